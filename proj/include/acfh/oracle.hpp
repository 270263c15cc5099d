#pragma once

// Reference solver for the implicit step, independent of the ADMM path.
//
// Damped Newton on the full nonlinear system
//   (u - u^n)/tau - eps^2 lap_h u + log u - log(1-u) + theta (1 - 2u^n) = 0
// with Hessian 1/tau - eps^2 lap_h + diag(1/(u(1-u))). The Newton systems are
// not circulant, so they are solved with Jacobi-preconditioned CG. Backtracking
// keeps every iterate inside (0,1) and the residual norm strictly decreasing.

#include <vector>

#include "acfh/error.hpp"
#include "acfh/grid.hpp"
#include "acfh/model.hpp"

namespace acfh::oracle {

struct NewtonConfig {
  double tol = 1e-12;  ///< target ||residual||_h
  int max_iter = 100;
  double shrink = 0.5;     ///< backtracking factor
  double min_step = 1e-12; ///< smallest accepted step length
  int cg_max_iter = 20000;
};

struct NewtonReport {
  Field u;
  std::vector<double> residual_history;  ///< ||residual||_h after each accepted step, initial first
  int iterations = 0;
  /// Stopped because no step could reduce the residual further while the Newton
  /// correction was at rounding level; the final residual may sit above tol.
  bool roundoff_limited = false;
};

class NewtonNonconvergence : public ConvergenceError {
 public:
  NewtonNonconvergence(const std::string& what, std::vector<double> history)
      : ConvergenceError(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Scheme residual, evaluated with an explicit periodic stencil loop.
Field scheme_residual(const Field& u, const Field& u_prev, const ModelParams& params);

NewtonReport solve_reference_detailed(const Field& u_prev, const ModelParams& params, const NewtonConfig& cfg = {},
                                      const Field* start = nullptr);
Field solve_reference(const Field& u_prev, const ModelParams& params, const NewtonConfig& cfg = {});

/// u3* = -(u* - u^n)/tau + eps^2 lap_h u*.
Field stationary_multiplier(const Field& u_star, const Field& u_prev, const ModelParams& params);
/// u3* = log u* - log(1-u*) + theta (1 - 2u^n); equal to the above at a solution.
Field stationary_multiplier_from_potential(const Field& u_star, const Field& u_prev, const ModelParams& params);

struct KktResiduals {
  double quadratic = 0.0;    ///< ||(u1 - u^n)/tau - eps^2 lap u1 + u3||_h
  double logarithmic = 0.0;  ///< ||log u2 - log(1-u2) + theta(1 - 2u^n) - u3||_h
  double constraint = 0.0;   ///< ||u1 - u2||_h
};

KktResiduals kkt_residuals(const Field& u1, const Field& u2, const Field& u3, const Field& u_prev,
                           const ModelParams& params);

}  // namespace acfh::oracle
