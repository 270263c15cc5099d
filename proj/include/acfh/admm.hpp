#pragma once

// ADMM solver for one implicit step of the convex splitting scheme.
//
// The step minimizes J(u) = J1(u) + J2(u), with J1 the quadratic part
// (time difference and gradient energy) and J2 the logarithmic part plus the
// explicit concave term. Splitting u into u1 (J1) and u2 (J2) with the
// constraint u1 = u2 and multiplier u3, one iteration is
//
//   u2 <- cellwise root of  log u2 - log(1-u2) + theta(1 - 2u^n) - u3 - rho(u1 - u2) = 0
//   u1 <- (1/tau - eps^2 lap_h + rho)^{-1} (u^n / tau + rho u2 - u3)
//   u3 <- u3 + alpha rho (u1 - u2)
//
// starting from u1 = u2 = u^n, u3 = 0, and stopping once
// max(||u1 - u2||_h, ||u1^(k) - u1^(k-1)||_h) <= gamma.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "acfh/error.hpp"
#include "acfh/grid.hpp"
#include "acfh/model.hpp"
#include "acfh/spectral.hpp"

namespace acfh {

enum class RhoPolicy {
  fixed,     ///< rho0 for the whole solve
  adaptive,  ///< residual-balancing updates starting from rho0
  optimal,   ///< rho_opt = sqrt(mu1 L1), no adaptation
};

std::string to_string(RhoPolicy p);
RhoPolicy parse_rho_policy(const std::string& s);

struct AdmmConfig {
  std::optional<double> rho0;  ///< initial penalty; rho_opt when unset
  double alpha = 1.0;          ///< multiplier step, 0 < alpha < (1 + sqrt 5)/2
  double gamma = 1e-8;         ///< stopping tolerance on max(r, s)
  double nu = 10.0;            ///< residual imbalance ratio triggering a penalty change
  double gamma1 = 2.0;         ///< penalty growth factor
  double gamma2 = 2.0;         ///< penalty shrink factor
  RhoPolicy rho_policy = RhoPolicy::adaptive;
  int max_iter = 10000;
  bool carry_multiplier = false;  ///< start u3 from the previous step's multiplier
  double newton_tol = 1e-14;      ///< cellwise tolerance of the u2 solve
  /// Permit alpha >= golden ratio. Only for probing divergence; convergence is
  /// not guaranteed there.
  bool allow_unsafe_alpha = false;

  void validate() const;
  bool adaptive() const noexcept { return rho_policy == RhoPolicy::adaptive; }
  double initial_rho(const SchemeConstants& c) const;
};

inline constexpr double kGoldenRatio = 1.6180339887498949;

struct AdmmState {
  Field u1, u2, u3;
  double rho = 1.0;
  int k = 0;
  double r = 0.0;  ///< ||u1 - u2||_h
  double s = 0.0;  ///< ||u1^(k) - u1^(k-1)||_h, +inf at k = 0
};

struct IterationRecord {
  int k = 0;
  double rho = 0.0;
  double r = 0.0;
  double s = 0.0;
  std::optional<double> phi;
  std::optional<double> R;
};

struct IterationTrace {
  std::vector<IterationRecord> records;

  int iterations() const noexcept { return records.empty() ? 0 : records.back().k; }
  /// Columns k,rho,r,s,phi,R; phi and R blank when not computed.
  std::string to_csv() const;
};

class AdmmNonconvergence : public ConvergenceError {
 public:
  AdmmNonconvergence(const std::string& what, IterationTrace trace)
      : ConvergenceError(what), trace_(std::move(trace)) {}
  const IterationTrace& trace() const noexcept { return trace_; }

 private:
  IterationTrace trace_;
};

// Single updates. Each returns the new value of one block.

/// Cellwise solve with m = rho u1 + u3 - theta (1 - 2 u^n), warm-started from u2.
Field update_u2(const AdmmState& state, const Field& u_prev, double theta, double newton_tol = 1e-14);
/// op must have shift 1/tau + state.rho and diffusion eps^2.
Field update_u1(const AdmmState& state, const Field& u_prev, double tau, const HelmholtzOperator& op);
Field update_u3(const AdmmState& state, double alpha);
/// Residual balancing: grow rho when r > nu s, shrink when s > nu r.
double adapt_rho(const AdmmState& state, const AdmmConfig& cfg);

struct StepResult {
  Field u_next;      ///< final u1
  Field multiplier;  ///< final u3
  IterationTrace trace;
};

/// Called with the initial triple (k = 0) and after every iteration.
using IterationObserver = std::function<void(const AdmmState&)>;

class AdmmSolver {
 public:
  AdmmSolver(const ModelParams& params, const AdmmConfig& cfg);

  const ModelParams& params() const noexcept { return params_; }
  const AdmmConfig& config() const noexcept { return cfg_; }
  const SchemeConstants& constants() const noexcept { return constants_; }

  /// One time step from u_prev. initial_multiplier replaces u3 = 0 when given.
  StepResult solve_step(const Field& u_prev, const IterationObserver& observer = {},
                        const Field* initial_multiplier = nullptr) const;

 private:
  ModelParams params_;
  AdmmConfig cfg_;
  SchemeConstants constants_;
  HelmholtzOperator op_;  // shift 1/tau + initial rho
};

StepResult solve_step(const Field& u_prev, const ModelParams& params, const AdmmConfig& cfg);

}  // namespace acfh
