#pragma once

// Error sequences of the ADMM iteration against a converged reference step.
//
// With e_i = u_i - u_i* and the stationary triple (u*, u*, u3*):
//   Phi^(k) = ||e3||^2 / (alpha rho) + rho ||e1||^2 + eta rho ||e1 - e2||^2,
//             eta = max(1 - alpha, 1 - 1/alpha)
//   R^(k)   = rho ||e1||^2 + ||e3||^2 / rho
// Phi is nonincreasing for fixed rho and 0 < alpha < golden ratio, with
//   Phi^(k) - Phi^(k+1) >= alpha c rho ||e1^(k+1) - e1^(k)||^2 + c rho ||e1^(k+1) - e2^(k+1)||^2,
//   c = min(1, 1 + 1/alpha - alpha).
// At alpha = 1, R^(k) >= (1 + delta(rho)) R^(k+1).

#include <optional>
#include <vector>

#include "acfh/admm.hpp"

namespace acfh {

double phi_eta(double alpha);
double phi_c(double alpha);

struct PhiRRecord {
  int k = 0;
  double rho = 0.0;
  double phi = 0.0;
  double R = 0.0;
  /// ||e1^(k) - e1^(k-1)||^2; zero at k = 0.
  double e1_step_sq = 0.0;
  /// ||e1^(k) - e2^(k)||^2.
  double split_gap_sq = 0.0;
};

/// Lower bound on Phi^(k-1) - Phi^(k) for the record at k >= 1.
double phi_decrement_bound(const PhiRRecord& rec, double alpha);

/// Observer that evaluates Phi^(k) and R^(k) for every iterate of a fixed-rho
/// solve. Feeding it a state whose rho differs from the one it was built for
/// raises ContractError: the sequences are only meaningful at fixed penalty.
class PhiRMonitor {
 public:
  PhiRMonitor(Field u_star, const Field& u_prev, const ModelParams& params, double alpha, double rho);

  void observe(const AdmmState& state);
  IterationObserver observer();

  const std::vector<PhiRRecord>& records() const noexcept { return records_; }
  const Field& u3_star() const noexcept { return u3_star_; }

 private:
  Field u_star_;
  Field u3_star_;
  double alpha_;
  double rho_;
  double eta_;
  std::optional<Field> prev_u1_;
  std::vector<PhiRRecord> records_;
};

/// Batch form over stored iterates (k = 0 first). Rejects adaptive configs.
std::vector<PhiRRecord> diagnostics_phi_r(const std::vector<AdmmState>& iterates, const Field& u_star,
                                          const Field& u_prev, const ModelParams& params, const AdmmConfig& cfg);

/// Copies phi and R into the matching trace rows.
void attach_phi_r(IterationTrace& trace, const std::vector<PhiRRecord>& records);

}  // namespace acfh
