#include "acfh/diagnostics.hpp"

#include <algorithm>

#include "acfh/oracle.hpp"

namespace acfh {

double phi_eta(double alpha) { return std::max(1.0 - alpha, 1.0 - 1.0 / alpha); }

double phi_c(double alpha) { return std::min(1.0, 1.0 + 1.0 / alpha - alpha); }

double phi_decrement_bound(const PhiRRecord& rec, double alpha) {
  const double c = phi_c(alpha);
  return alpha * c * rec.rho * rec.e1_step_sq + c * rec.rho * rec.split_gap_sq;
}

PhiRMonitor::PhiRMonitor(Field u_star, const Field& u_prev, const ModelParams& params, double alpha, double rho)
    : u_star_(std::move(u_star)),
      u3_star_(oracle::stationary_multiplier(u_star_, u_prev, params)),
      alpha_(alpha),
      rho_(rho),
      eta_(phi_eta(alpha)) {
  if (!(alpha > 0.0) || !(rho > 0.0)) throw ContractError("PhiRMonitor needs alpha > 0 and rho > 0");
}

void PhiRMonitor::observe(const AdmmState& st) {
  if (st.rho != rho_) throw ContractError("Phi/R diagnostics require a fixed penalty");
  const double e1 = distance(st.u1, u_star_);
  const double e3 = distance(st.u3, u3_star_);
  const double gap = distance(st.u1, st.u2);  // e1 - e2 = u1 - u2
  PhiRRecord rec;
  rec.k = st.k;
  rec.rho = rho_;
  rec.split_gap_sq = gap * gap;
  rec.phi = e3 * e3 / (alpha_ * rho_) + rho_ * e1 * e1 + eta_ * rho_ * rec.split_gap_sq;
  rec.R = rho_ * e1 * e1 + e3 * e3 / rho_;
  if (prev_u1_) {
    const double step = distance(st.u1, *prev_u1_);  // e1^(k) - e1^(k-1)
    rec.e1_step_sq = step * step;
  }
  prev_u1_ = st.u1;
  records_.push_back(rec);
}

IterationObserver PhiRMonitor::observer() {
  return [this](const AdmmState& st) { observe(st); };
}

std::vector<PhiRRecord> diagnostics_phi_r(const std::vector<AdmmState>& iterates, const Field& u_star,
                                          const Field& u_prev, const ModelParams& params, const AdmmConfig& cfg) {
  if (cfg.adaptive()) throw ContractError("Phi/R diagnostics are undefined for adaptive penalties");
  if (iterates.empty()) return {};
  PhiRMonitor monitor(u_star, u_prev, params, cfg.alpha, iterates.front().rho);
  for (const auto& st : iterates) monitor.observe(st);
  return monitor.records();
}

void attach_phi_r(IterationTrace& trace, const std::vector<PhiRRecord>& records) {
  for (const auto& rec : records) {
    for (auto& row : trace.records) {
      if (row.k == rec.k) {
        row.phi = rec.phi;
        row.R = rec.R;
        break;
      }
    }
  }
}

}  // namespace acfh
