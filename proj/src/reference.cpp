#include "acfh/reference.hpp"

#include "acfh/scalar_root.hpp"

namespace acfh::reference {

namespace {

template <class Body>
void for_each_cell(const GridSpec& s, const Body& body) {
  const long n = s.n;
  const long nk = s.dim == 3 ? n : 1;
  for (long k = 0; k < nk; ++k)
    for (long j = 0; j < n; ++j)
      for (long i = 0; i < n; ++i) body(i, j, k);
}

}  // namespace

EdgeField gradient(const Field& phi) {
  const GridSpec& s = phi.spec();
  EdgeField out(s);
  for_each_cell(s, [&](long i, long j, long k) {
    const double c = phi.at(i, j, k);
    out.components[0].at(i, j, k) = (phi.at(i + 1, j, k) - c) / s.h;
    out.components[1].at(i, j, k) = (phi.at(i, j + 1, k) - c) / s.h;
    if (s.dim == 3) out.components[2].at(i, j, k) = (phi.at(i, j, k + 1) - c) / s.h;
  });
  return out;
}

Field divergence(const EdgeField& f) {
  const GridSpec& s = f.spec;
  Field out(s);
  for_each_cell(s, [&](long i, long j, long k) {
    double v = (f.components[0].at(i, j, k) - f.components[0].at(i - 1, j, k)) / s.h +
               (f.components[1].at(i, j, k) - f.components[1].at(i, j - 1, k)) / s.h;
    if (s.dim == 3) v += (f.components[2].at(i, j, k) - f.components[2].at(i, j, k - 1)) / s.h;
    out.at(i, j, k) = v;
  });
  return out;
}

Field laplacian(const Field& phi) {
  const GridSpec& s = phi.spec();
  Field out(s);
  const double h2 = s.h * s.h;
  for_each_cell(s, [&](long i, long j, long k) {
    double v = phi.at(i + 1, j, k) + phi.at(i - 1, j, k) + phi.at(i, j + 1, k) + phi.at(i, j - 1, k) -
               4.0 * phi.at(i, j, k);
    if (s.dim == 3) v += phi.at(i, j, k + 1) + phi.at(i, j, k - 1) - 2.0 * phi.at(i, j, k);
    out.at(i, j, k) = v / h2;
  });
  return out;
}

double inner_product(const Field& a, const Field& b) {
  require_same_spec(a.spec(), b.spec(), "reference::inner_product");
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s * static_cast<long double>(a.spec().cell_volume()));
}

double inner_product(const EdgeField& a, const EdgeField& b) {
  double total = 0.0;
  for (std::size_t c = 0; c < a.components.size(); ++c) total += reference::inner_product(a.components[c], b.components[c]);
  return total;
}

Field solve_field(double rho, const Field& m, const Field* x_init) {
  Field out(m.spec());
  for (std::size_t c = 0; c < m.size(); ++c) {
    ScalarProblem p;
    p.rho = rho;
    p.m = m[c];
    out[c] = solve_scalar(p, x_init ? std::optional<double>((*x_init)[c]) : std::nullopt);
  }
  return out;
}

}  // namespace acfh::reference
