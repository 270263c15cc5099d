#include "acfh/grid.hpp"

#include <algorithm>
#include <sstream>

namespace acfh {

GridSpec GridSpec::make(int dim, double length, int n) {
  if (dim != 2 && dim != 3) throw ContractError("grid dimension must be 2 or 3");
  if (n < 2) throw ContractError("grid needs at least 2 cells per axis");
  if (!(length > 0.0) || !std::isfinite(length)) throw ContractError("domain length must be positive");
  return GridSpec{dim, length, n, length / n};
}

std::size_t GridSpec::cells() const noexcept {
  std::size_t c = 1;
  for (int a = 0; a < dim; ++a) c *= static_cast<std::size_t>(n);
  return c;
}

double GridSpec::cell_volume() const noexcept { return std::pow(h, dim); }

double GridSpec::measure() const noexcept { return std::pow(length, dim); }

std::string describe(const GridSpec& spec) {
  std::ostringstream os;
  os << spec.dim << "D N=" << spec.n << " L=" << spec.length;
  return os.str();
}

void require_same_spec(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) {
    throw ContractError(std::string(what) + ": grid mismatch (" + describe(a) + " vs " + describe(b) + ")");
  }
}

Field::Field(const GridSpec& spec, double value) : spec_(spec), values_(spec.cells(), value) {}

Field::Field(const GridSpec& spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.cells()) throw ContractError("field value count does not match grid");
}

std::size_t Field::index(long i, long j, long k) const noexcept {
  const long n = spec_.n;
  const auto wrap = [n](long v) { return static_cast<std::size_t>(((v % n) + n) % n); };
  const auto nn = static_cast<std::size_t>(n);
  if (spec_.dim == 2) return wrap(i) + nn * wrap(j);
  return wrap(i) + nn * (wrap(j) + nn * wrap(k));
}

Field& Field::operator+=(const Field& other) {
  require_same_spec(spec_, other.spec_, "Field +=");
  const auto n = static_cast<std::ptrdiff_t>(size());
  const double* b = other.data();
  double* a = data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) a[i] += b[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_spec(spec_, other.spec_, "Field -=");
  const auto n = static_cast<std::ptrdiff_t>(size());
  const double* b = other.data();
  double* a = data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) a[i] -= b[i];
  return *this;
}

Field& Field::operator*=(double s) {
  const auto n = static_cast<std::ptrdiff_t>(size());
  double* a = data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) a[i] *= s;
  return *this;
}

Field operator+(const Field& a, const Field& b) {
  Field out = a;
  out += b;
  return out;
}

Field operator-(const Field& a, const Field& b) {
  Field out = a;
  out -= b;
  return out;
}

Field operator*(double s, const Field& a) {
  Field out = a;
  out *= s;
  return out;
}

void axpy(double a, const Field& x, Field& y) {
  require_same_spec(x.spec(), y.spec(), "axpy");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const double* xs = x.data();
  double* ys = y.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) ys[i] += a * xs[i];
}

EdgeField::EdgeField(const GridSpec& s, double value) : spec(s) {
  components.reserve(static_cast<std::size_t>(s.dim));
  for (int a = 0; a < s.dim; ++a) components.emplace_back(s, value);
}

namespace {

// Row decomposition: a row is a fixed (j, k) with i running fastest. For each
// row we precompute the base offsets of the periodic neighbour rows.
struct Row {
  std::size_t base, y_plus, y_minus, z_plus, z_minus;
};

inline Row row_offsets(const GridSpec& s, std::size_t r) {
  const std::size_t n = static_cast<std::size_t>(s.n);
  const std::size_t j = r % n;
  const std::size_t k = r / n;
  const std::size_t jp = j + 1 == n ? 0 : j + 1;
  const std::size_t jm = j == 0 ? n - 1 : j - 1;
  const std::size_t kp = k + 1 == n ? 0 : k + 1;
  const std::size_t km = k == 0 ? n - 1 : k - 1;
  const std::size_t plane = n * n;
  Row row{};
  row.base = n * j + plane * k;
  row.y_plus = n * jp + plane * k;
  row.y_minus = n * jm + plane * k;
  row.z_plus = n * j + plane * kp;
  row.z_minus = n * j + plane * km;
  return row;
}

inline std::size_t row_count(const GridSpec& s) { return s.cells() / static_cast<std::size_t>(s.n); }

}  // namespace

EdgeField gradient(const Field& phi) {
  const GridSpec& s = phi.spec();
  EdgeField out(s);
  const std::size_t n = static_cast<std::size_t>(s.n);
  const double inv_h = 1.0 / s.h;
  const double* p = phi.data();
  double* gx = out.components[0].data();
  double* gy = out.components[1].data();
  double* gz = s.dim == 3 ? out.components[2].data() : nullptr;
  const auto rows = static_cast<std::ptrdiff_t>(row_count(s));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const Row row = row_offsets(s, static_cast<std::size_t>(r));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = row.base + i;
      const std::size_t ip = i + 1 == n ? 0 : i + 1;
      gx[c] = (p[row.base + ip] - p[c]) * inv_h;
      gy[c] = (p[row.y_plus + i] - p[c]) * inv_h;
      if (gz) gz[c] = (p[row.z_plus + i] - p[c]) * inv_h;
    }
  }
  return out;
}

Field divergence(const EdgeField& f) {
  const GridSpec& s = f.spec;
  Field out(s);
  const std::size_t n = static_cast<std::size_t>(s.n);
  const double inv_h = 1.0 / s.h;
  const double* fx = f.components[0].data();
  const double* fy = f.components[1].data();
  const double* fz = s.dim == 3 ? f.components[2].data() : nullptr;
  double* o = out.data();
  const auto rows = static_cast<std::ptrdiff_t>(row_count(s));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const Row row = row_offsets(s, static_cast<std::size_t>(r));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = row.base + i;
      const std::size_t im = i == 0 ? n - 1 : i - 1;
      double v = (fx[c] - fx[row.base + im]) + (fy[c] - fy[row.y_minus + i]);
      if (fz) v += fz[c] - fz[row.z_minus + i];
      o[c] = v * inv_h;
    }
  }
  return out;
}

Field laplacian(const Field& phi) {
  const GridSpec& s = phi.spec();
  Field out(s);
  const std::size_t n = static_cast<std::size_t>(s.n);
  const double inv_h2 = 1.0 / (s.h * s.h);
  const double* p = phi.data();
  double* o = out.data();
  const bool three = s.dim == 3;
  const double center = three ? 6.0 : 4.0;
  const auto rows = static_cast<std::ptrdiff_t>(row_count(s));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const Row row = row_offsets(s, static_cast<std::size_t>(r));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = row.base + i;
      const std::size_t ip = i + 1 == n ? 0 : i + 1;
      const std::size_t im = i == 0 ? n - 1 : i - 1;
      double v = p[row.base + ip] + p[row.base + im] + p[row.y_plus + i] + p[row.y_minus + i];
      if (three) v += p[row.z_plus + i] + p[row.z_minus + i];
      o[c] = (v - center * p[c]) * inv_h2;
    }
  }
  return out;
}

double inner_product(const Field& a, const Field& b) {
  require_same_spec(a.spec(), b.spec(), "inner_product");
  const double* x = a.data();
  const double* y = b.data();
  return a.spec().cell_volume() * pairwise_reduce(a.size(), [x, y](std::size_t i) { return x[i] * y[i]; });
}

double inner_product(const EdgeField& a, const EdgeField& b) {
  require_same_spec(a.spec, b.spec, "inner_product");
  if (a.components.size() != b.components.size()) throw ContractError("inner_product: edge field kind mismatch");
  double total = 0.0;
  for (std::size_t c = 0; c < a.components.size(); ++c) total += inner_product(a.components[c], b.components[c]);
  return total;
}

double norm(const Field& a) { return std::sqrt(inner_product(a, a)); }

double norm(const EdgeField& a) { return std::sqrt(inner_product(a, a)); }

double distance(const Field& a, const Field& b) {
  require_same_spec(a.spec(), b.spec(), "distance");
  const double* x = a.data();
  const double* y = b.data();
  const double ss = pairwise_reduce(a.size(), [x, y](std::size_t i) {
    const double d = x[i] - y[i];
    return d * d;
  });
  return std::sqrt(a.spec().cell_volume() * ss);
}

double mean(const Field& a) {
  const double* x = a.data();
  return pairwise_reduce(a.size(), [x](std::size_t i) { return x[i]; }) / static_cast<double>(a.size());
}

double reduce_min(const Field& a) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  const double* x = a.data();
  double m = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : m)
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::min(m, x[i]);
  return m;
}

double reduce_max(const Field& a) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  const double* x = a.data();
  double m = -std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

std::size_t first_outside_unit_interval(const Field& u) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  const double* x = u.data();
  std::ptrdiff_t bad = n;
#pragma omp parallel for schedule(static) reduction(min : bad)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0 && x[i] < 1.0) && i < bad) bad = i;
  }
  return static_cast<std::size_t>(bad);
}

void require_open_unit_interval(const Field& u, const char* what) {
  const std::size_t bad = first_outside_unit_interval(u);
  if (bad < u.size()) {
    throw DomainError(std::string(what) + ": value " + std::to_string(u[bad]) + " outside (0,1)", bad);
  }
}

}  // namespace acfh
