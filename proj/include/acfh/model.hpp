#pragma once

// Flory-Huggins potential, the discrete energy, the per-step objective of the
// convex splitting scheme and its convexity constants.

#include "acfh/grid.hpp"

namespace acfh {

struct ModelParams {
  double epsilon = 0.1;  ///< interface width
  double theta = 4.0;    ///< Flory-Huggins interaction, > 2
  double tau = 1e-2;     ///< time step
  GridSpec grid;

  void validate() const;
};

/// F(x) = x log x + (1-x) log(1-x) + theta (x - x^2), 0 < x < 1.
double potential_F(double x, double theta);
/// f(x) = F'(x) = log x - log(1-x) + theta (1 - 2x).
double potential_f(double x, double theta);

/// E_h(u) = <F(u), 1>_h + (eps^2 / 2) ||grad_h u||_h^2.
double discrete_energy(const Field& u, const ModelParams& params);

struct ObjectiveValue {
  double j1 = 0.0;  ///< ||u - u_prev||^2 / (2 tau) + (eps^2 / 2) ||grad u||^2
  double j2 = 0.0;  ///< <u, log u> + <1-u, log(1-u)> + theta <u, 1 - 2 u_prev>
  double total() const noexcept { return j1 + j2; }
};

double objective_j1(const Field& u, const Field& u_prev, const ModelParams& params);
double objective_j2(const Field& u, const Field& u_prev, const ModelParams& params);
ObjectiveValue objective(const Field& u, const Field& u_prev, const ModelParams& params);

/// Gradient of J with respect to <.,.>_h:
///   (u - u_prev)/tau - eps^2 lap u + log u - log(1-u) + theta (1 - 2 u_prev).
/// It vanishes exactly at the solution of the implicit step.
Field scheme_residual_field(const Field& u, const Field& u_prev, const ModelParams& params);
/// ||scheme_residual_field||_h
double scheme_residual(const Field& u, const Field& u_prev, const ModelParams& params);

/// Strong convexity / smoothness constants of J1 and the penalty they select.
struct SchemeConstants {
  double mu1 = 1.0;
  double L1 = 1.0;
  double rho_opt = 1.0;
  double delta_max = 1.0;

  /// Guaranteed contraction margin of R^(k) at multiplier step 1:
  /// 2 / (rho / mu1 + L1 / rho).
  double delta(double rho) const;
};

/// mu1 = 1/tau, L1 = 1/tau + eps^2 * lambda_max(-lap_h) with
/// lambda_max = 4 dim / h^2 (8/h^2 in 2D, 12/h^2 in 3D).
SchemeConstants scheme_constants(const ModelParams& params);

}  // namespace acfh
