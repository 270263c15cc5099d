#pragma once

// Desk-scale studies: spatial and temporal convergence tables, the linear rate
// of the ADMM error sequence R^(k) against delta(rho), the Phi-monotonicity
// sweep over alpha, and a single-step iteration trace.

#include <optional>
#include <string>
#include <vector>

#include "acfh/config.hpp"
#include "acfh/diagnostics.hpp"
#include "acfh/driver.hpp"
#include "acfh/oracle.hpp"

namespace acfh {

/// Block average of fine onto an n_coarse grid (n_coarse must divide N).
Field restrict_to(const Field& fine, int n_coarse);

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::string render_assertions(const std::vector<Assertion>& checks);
bool all_passed(const std::vector<Assertion>& checks);

struct RateRow {
  double resolution = 0.0;  ///< h (spatial) or tau (temporal)
  double error = 0.0;       ///< ||u - restrict(u_ref)||_h at T
  std::optional<double> rate;
  int steps = 0;
  int iterations = 0;  ///< total ADMM iterations of the run
};

enum class StudyKind { spatial, temporal };

std::string to_string(StudyKind kind);
StudyKind parse_study_kind(const std::string& s);

struct RateTable {
  StudyKind kind = StudyKind::spatial;
  double reference = 0.0;  ///< reference N or tau
  std::vector<RateRow> rows;

  /// Columns resolution,error,rate (rate blank on the first row).
  std::string to_csv() const;
  std::vector<double> rates() const;
};

/// Each N in cfg.study.ladder (default 16, 32, 64) against N = cfg.study.reference
/// (default 256), all at cfg.params.tau up to cfg.final_time.
RateTable spatial_study(const RunConfig& cfg);
/// Each tau in cfg.study.ladder (default 0.02, 0.01, 0.005) against
/// tau = cfg.study.reference (default 0.02 / 64) on cfg's grid.
RateTable temporal_study(const RunConfig& cfg);

/// Rates in [lo, hi]. Temporal rows whose tau is closer than a factor 16 to the
/// reference are reported but not asserted (self-reference artifact).
std::vector<Assertion> assess_rates(const RateTable& table, double lo, double hi);

/// State u^{step-1} of the run described by cfg (its solver settings are used).
Field state_before_step(const RunConfig& cfg, int step);

/// Converged reference for one step by the independent Newton solver.
Field reference_step(const Field& u_prev, const ModelParams& params);

struct RateCase {
  double rho = 0.0;
  double delta = 0.0;
  double bound = 0.0;     ///< 1 / (1 + delta)
  double observed = 0.0;  ///< max R^(k+1)/R^(k) over the resolvable window
  int window = 0;         ///< number of ratios inspected
  int iterations = 0;
  std::vector<PhiRRecord> records;
};

struct RateReport {
  SchemeConstants constants;
  std::vector<RateCase> cases;
  std::vector<Assertion> checks;

  std::string to_csv() const;
  std::string summary() const;
};

/// Ratios are inspected while R^(k+1) stays above this fraction of R^(0);
/// below it the reference u* and rounding dominate the error.
inline constexpr double kRateWindowFloor = 1e-16;
/// Slack on contraction ratios.
inline constexpr double kRateSlack = 1e-9;

/// Fixed-rho ADMM at the given multiplier step for each penalty, on step
/// cfg.study.step. Penalties default to rho_opt * cfg.study.rho_factors.
RateReport rate_study(const RunConfig& cfg, const std::vector<double>& rhos = {}, double alpha = 1.0);

struct PhiCase {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  bool asserted = true;
  double worst_increase = 0.0;     ///< max Phi^(k+1) - Phi^(k)
  double worst_bound_gap = 0.0;    ///< max bound - decrement
  int iterations = 0;
  bool converged = false;
  std::vector<PhiRRecord> records;
};

struct PhiReport {
  double rho = 0.0;
  std::vector<PhiCase> cases;
  std::vector<Assertion> checks;

  std::string to_csv() const;
  std::string summary() const;
};

inline constexpr double kPhiSlack = 1e-9;
/// Probed without assertion: beyond the golden ratio.
inline constexpr double kPhiProbeAlpha = 1.7;

/// Phi sweep over cfg.study.alphas plus the 1.7 probe, at rho = cfg.admm.rho0
/// (rho_opt when unset), on `instances` random seeds starting at cfg.seed.
PhiReport phi_sweep(const RunConfig& cfg, int instances = 3);

struct DiagnoseResult {
  IterationTrace trace;
  double residual = 0.0;  ///< scheme residual of the ADMM result
};

/// Trace of the ADMM solve at step n with Phi and R attached. Needs a fixed
/// penalty (policy fixed/optimal); throws ConfigError for adaptive configs.
DiagnoseResult diagnose(const RunConfig& cfg, int step);

}  // namespace acfh
