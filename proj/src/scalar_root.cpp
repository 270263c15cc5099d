#include "acfh/scalar_root.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

namespace acfh {

void ScalarProblem::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ContractError("scalar problem needs rho > 0");
  if (!std::isfinite(m)) throw ContractError("scalar problem needs finite m");
  if (!(tol > 0.0)) throw ContractError("scalar problem needs tol > 0");
  if (max_iter < 1) throw ContractError("scalar problem needs max_iter >= 1");
}

ScalarConvergenceError::ScalarConvergenceError(double last_x, double residual)
    : ConvergenceError("safeguarded Newton did not converge: last x = " + std::to_string(last_x) +
                       ", h(x) = " + std::to_string(residual)),
      last_x_(last_x),
      residual_(residual) {}

double shifted_logit(double x, double rho, double m) { return std::log(x) - std::log1p(-x) + rho * x - m; }

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::denorm_min();

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Reduced problem on the half of (0,1) that holds the root:
//   g(y) = log y - log(1 - y) + rho y - mr,   0 < y <= 1/2,   g(1/2) >= 0.
struct Reduced {
  double rho;
  double mr;
  bool mirrored;  // x = 1 - y

  double g(double y) const { return std::log(y / (1.0 - y)) + rho * y - mr; }
  double dg(double y) const { return 1.0 / (y * (1.0 - y)) + rho; }
  // Rounding level of g near y; below it the sign of g carries no information.
  double noise(double y) const { return 8.0 * kEps * (rho * y + std::abs(mr)); }

  double to_x(double y) const {
    if (!mirrored) return std::max(y, kTiny);
    return std::min(1.0 - y, std::nextafter(1.0, 0.0));
  }
  // Warm start mapped onto this half, if it lies there.
  std::optional<double> from_x(double x) const {
    const double y = mirrored ? 1.0 - x : x;
    if (y > 0.0 && y <= 0.5) return y;
    return std::nullopt;
  }
};

Reduced reduce(const ScalarProblem& p) {
  if (0.5 * p.rho - p.m >= 0.0) return Reduced{p.rho, p.m, false};
  return Reduced{p.rho, p.rho - p.m, true};
}

}  // namespace

namespace {

// Assumes a validated problem and a warm start inside (0,1) when present.
ScalarResult solve_core(const ScalarProblem& p, std::optional<double> x_init, std::vector<double>* iterates) {
  const Reduced red = reduce(p);
  ScalarResult res;

  double y = 0.0;
  double gy = -std::numeric_limits<double>::infinity();
  double hi = 0.5;

  // A warm start left of the root is used directly; from the right, one Newton
  // step lands left of it because g is concave and increasing.
  if (x_init) {
    if (auto yw = red.from_x(*x_init)) {
      const double gw = red.g(*yw);
      if (gw < 0.0 || gw <= red.noise(*yw)) {
        y = *yw;
        gy = gw;
      } else {
        hi = *yw;
        const double cand = *yw - gw / red.dg(*yw);
        if (cand > 0.0 && cand < hi) {
          const double gc = red.g(cand);
          if (gc < 0.0 || gc <= red.noise(cand)) {
            y = cand;
            gy = gc;
          } else {
            hi = cand;
          }
        }
      }
    }
  }

  if (!(y > 0.0)) {
    // Enclosure from the fixed point y = sigmoid(mr - rho y): any upper bound U
    // of the root yields the lower bound sigmoid(mr - rho U), and conversely.
    hi = std::min(hi, sigmoid(red.mr));
    double lo = sigmoid(red.mr - red.rho * hi);
    hi = std::min(hi, sigmoid(red.mr - red.rho * lo));
    lo = std::max(lo, sigmoid(red.mr - red.rho * hi));
    y = lo;
    gy = y > 0.0 ? red.g(y) : -std::numeric_limits<double>::infinity();
    // The guess mr/rho ignores the logarithms; keep it when it improves the start.
    const double cand = std::clamp(red.mr / red.rho, 1e-9, 0.5);
    if (cand > y && cand <= hi) {
      const double gc = red.g(cand);
      if (gc < 0.0) {
        y = cand;
        gy = gc;
      } else if (cand < hi) {
        hi = cand;
      }
    }
  }
  double lo = y;
  if (y > 0.0 && gy >= 0.0) {
    // Rounding in the enclosure put the start at (or just past) the root.
    hi = y;
    lo = 0.0;
  }

  if (!(y > 0.0)) {
    // Root lies below the smallest subnormal.
    res.x = red.to_x(kTiny);
    res.residual = shifted_logit(res.x, p.rho, p.m);
    if (iterates) iterates->push_back(res.x);
    return res;
  }
  if (iterates) iterates->push_back(red.to_x(y));

  while (std::abs(gy) > std::max(p.tol, red.noise(y))) {
    if (res.iterations >= p.max_iter) {
      throw ScalarConvergenceError(red.to_x(y), shifted_logit(red.to_x(y), p.rho, p.m));
    }
    const double step = gy / red.dg(y);
    if (std::abs(step) <= 2.0 * kEps * y) break;
    double next = y - step;
    bool bisect = !(next > lo && next < hi);
    double gn = 0.0;
    if (!bisect) {
      gn = red.g(next);
      bisect = std::abs(gn) > std::abs(gy) && std::abs(gn) > red.noise(next);
    }
    if (bisect) {
      next = lo > 0.0 && hi > 4.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
      gn = red.g(next);
      ++res.bisections;
    }
    ++res.iterations;
    assert(next > 0.0 && next <= 0.5);
    const double moved = std::abs(next - y);
    if (gn < 0.0) {
      lo = next;
    } else {
      hi = next;
    }
    y = next;
    gy = gn;
    if (iterates) iterates->push_back(red.to_x(y));
    if (moved <= 4.0 * kEps * y || hi - lo <= 4.0 * kEps * y) break;
  }
  res.x = red.to_x(y);
  res.residual = red.mirrored ? -gy : gy;
  return res;
}

}  // namespace

ScalarResult solve_scalar_detailed(const ScalarProblem& p, std::optional<double> x_init, std::vector<double>* iterates) {
  p.validate();
  if (x_init && !(*x_init > 0.0 && *x_init < 1.0)) throw ContractError("warm start must lie in (0,1)");
  return solve_core(p, x_init, iterates);
}

double solve_scalar(const ScalarProblem& p, std::optional<double> x_init) {
  return solve_scalar_detailed(p, x_init).x;
}

Field solve_field(double rho, const Field& m_field, const Field* x_init, double tol) {
  {
    ScalarProblem p;
    p.rho = rho;
    p.tol = tol;
    p.validate();
  }
  if (x_init) require_same_spec(m_field.spec(), x_init->spec(), "solve_field");
  Field out(m_field.spec());
  const auto n = static_cast<std::ptrdiff_t>(m_field.size());
  const double* m = m_field.data();
  const double* w = x_init ? x_init->data() : nullptr;
  double* o = out.data();
  std::ptrdiff_t bad = n;
#pragma omp parallel for schedule(static) reduction(min : bad)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    ScalarProblem p;
    p.rho = rho;
    p.m = m[i];
    p.tol = tol;
    try {
      std::optional<double> start;
      if (w && w[i] > 0.0 && w[i] < 1.0) start = w[i];
      if (!std::isfinite(p.m)) throw ContractError("non-finite m");
      o[i] = solve_core(p, start, nullptr).x;
    } catch (const std::exception&) {
      if (i < bad) bad = i;
    }
  }
  if (bad < n) {
    const auto b = static_cast<std::size_t>(bad);
    ScalarProblem p;
    p.rho = rho;
    p.m = m[b];
    p.tol = tol;
    std::string why = "scalar solve failed";
    try {
      solve_scalar(p);
    } catch (const std::exception& e) {
      why = e.what();
    }
    throw DomainError("solve_field: " + why, b);
  }
  return out;
}

}  // namespace acfh
