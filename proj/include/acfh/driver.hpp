#pragma once

// Time stepping, initial conditions and per-step run diagnostics.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "acfh/admm.hpp"
#include "acfh/config.hpp"

namespace acfh {

/// SplitMix64 stream; next_unit() maps the top 53 bits to [0, 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double next_unit();

 private:
  std::uint64_t state_;
};

/// Sine IC: offset + amplitude * prod_axes sin(2 pi x / L) at cell centers (i + 1/2) h.
/// Random IC: offset + amplitude * U[0,1), cells drawn in storage order.
Field make_initial_condition(const RunConfig& cfg);

struct StepRecord {
  int step = 0;
  double time = 0.0;
  int iters = 0;
  double energy = 0.0;
  double umin = 0.0;
  double umax = 0.0;
  double wall_ms = 0.0;
  /// E(u^n) - E(u^{n+1}) - ||u^{n+1} - u^n||^2 / (2 tau); zero on the initial row.
  double dissipation_margin = 0.0;
  /// max over the step's u2 iterates of min(u2) and max(u2).
  double u2_min = 0.0;
  double u2_max = 0.0;
};

struct RunDiagnostics {
  std::vector<StepRecord> records;  ///< step 0 is the initial condition

  double initial_energy() const;
  int total_iterations() const;
  int max_iterations() const;

  /// Columns step,time,iters,energy,umin,umax,wall_ms.
  std::string to_csv() const;
  static RunDiagnostics from_csv(const std::string& text);
  void save_csv(const std::filesystem::path& path) const;
};

struct RunHooks {
  /// Called after every accepted step (and once for the initial state) with the new field.
  std::function<void(const StepRecord&, const Field&)> on_step;
  /// Replaces make_initial_condition when set.
  const Field* initial = nullptr;
};

/// Relative slack on energy increase between consecutive steps.
inline constexpr double kEnergySlack = 1e-12;

/// Advances cfg.steps() steps. Throws InvariantBreach on energy increase or a
/// bound violation, ConvergenceError when ADMM stalls. When cfg.output_dir is
/// set, diagnostics.csv is written there (also on failure, with the steps done
/// so far) and snapshots go to snapshot_NNNNNN.acfh.
RunDiagnostics run(const RunConfig& cfg, const RunHooks& hooks = {});

/// The final field of run(cfg).
struct RunOutcome {
  RunDiagnostics diagnostics;
  Field final_state;
};
RunOutcome run_to_end(const RunConfig& cfg, const RunHooks& hooks = {});

/// Steps n at which a snapshot is taken: the last step whose time does not exceed t.
std::vector<int> snapshot_steps(const RunConfig& cfg);

std::filesystem::path snapshot_path(const std::filesystem::path& dir, int step);

}  // namespace acfh
