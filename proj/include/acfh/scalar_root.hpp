#pragma once

// Safeguarded Newton solver for
//
//   h(x) = log x - log(1 - x) + rho x - m = 0,   0 < x < 1,
//
// the cellwise optimality condition of the logarithmic subproblem. h is strictly
// increasing, concave on (0, 1/2] and convex on [1/2, 1), so the root lies in
// (0, 1/2] when h(1/2) = rho/2 - m >= 0 and in (1/2, 1) otherwise.
//
// The solver always works on the half containing the root, expressed through the
// distance y from the nearer endpoint (y = x or y = 1 - x). On that half the
// reduced function is concave and increasing in y, so Newton started from a
// point with negative value increases monotonically to the root; in terms of x
// this is the monotone decrease from the right in the convex half. Working in y
// keeps full relative precision for roots very close to 0 or 1.

#include <optional>
#include <vector>

#include "acfh/error.hpp"
#include "acfh/grid.hpp"

namespace acfh {

struct ScalarProblem {
  double rho = 1.0;
  double m = 0.0;
  double tol = 1e-14;  ///< absolute tolerance on |h|
  int max_iter = 100;

  void validate() const;
};

struct ScalarResult {
  double x = 0.5;
  double residual = 0.0;  ///< h(x)
  int iterations = 0;     ///< Newton or bisection updates taken
  int bisections = 0;     ///< updates that fell back to bisection
};

class ScalarConvergenceError : public ConvergenceError {
 public:
  ScalarConvergenceError(double last_x, double residual);
  double last_x() const noexcept { return last_x_; }
  double residual() const noexcept { return residual_; }

 private:
  double last_x_;
  double residual_;
};

/// h(x) with log(1 - x) evaluated as log1p(-x).
double shifted_logit(double x, double rho, double m);

/// Returns x* in (0, 1). Iteration stops when |h| <= tol or when the Newton
/// update no longer changes the iterate at working precision (roots whose h
/// cannot be resolved below tol in double arithmetic, e.g. |m| ~ 1e6). Roots
/// closer to 0 or 1 than double resolution are returned as the nearest
/// representable interior value.
double solve_scalar(const ScalarProblem& p, std::optional<double> x_init = std::nullopt);

/// As solve_scalar, reporting iteration counts. When iterates is non-null every
/// iterate (starting point included) is appended, mapped back to x.
ScalarResult solve_scalar_detailed(const ScalarProblem& p, std::optional<double> x_init = std::nullopt,
                                   std::vector<double>* iterates = nullptr);

/// Cellwise solve with m taken from m_field. x_init, when given, warm-starts
/// each cell. A failing cell raises DomainError naming the lowest failing index.
Field solve_field(double rho, const Field& m_field, const Field* x_init = nullptr,
                  double tol = 1e-14);

}  // namespace acfh
