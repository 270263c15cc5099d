#include "acfh/admm.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "acfh/scalar_root.hpp"

namespace acfh {

std::string to_string(RhoPolicy p) {
  switch (p) {
    case RhoPolicy::fixed:
      return "fixed";
    case RhoPolicy::adaptive:
      return "adaptive";
    case RhoPolicy::optimal:
      return "optimal";
  }
  return "unknown";
}

RhoPolicy parse_rho_policy(const std::string& s) {
  if (s == "fixed") return RhoPolicy::fixed;
  if (s == "adaptive") return RhoPolicy::adaptive;
  if (s == "optimal") return RhoPolicy::optimal;
  throw ContractError("unknown rho policy '" + s + "' (expected fixed, adaptive or optimal)");
}

void AdmmConfig::validate() const {
  if (rho0 && (!(*rho0 > 0.0) || !std::isfinite(*rho0))) throw ContractError("rho0 must be positive");
  if (!(alpha > 0.0)) throw ContractError("alpha must be positive");
  if (!allow_unsafe_alpha && !(alpha < kGoldenRatio)) {
    throw ContractError("alpha must lie in (0, (1+sqrt(5))/2)");
  }
  if (!(gamma > 0.0)) throw ContractError("gamma must be positive");
  if (!(nu > 1.0)) throw ContractError("nu must exceed 1");
  if (!(gamma1 > 1.0) || !(gamma2 > 1.0)) throw ContractError("gamma1 and gamma2 must exceed 1");
  if (max_iter < 1) throw ContractError("max_iter must be at least 1");
  if (!(newton_tol > 0.0)) throw ContractError("newton_tol must be positive");
}

double AdmmConfig::initial_rho(const SchemeConstants& c) const {
  if (rho_policy == RhoPolicy::optimal) return c.rho_opt;
  return rho0.value_or(c.rho_opt);
}

std::string IterationTrace::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "k,rho,r,s,phi,R\n";
  for (const auto& rec : records) {
    os << rec.k << ',' << rec.rho << ',' << rec.r << ',' << rec.s << ',';
    if (rec.phi) os << *rec.phi;
    os << ',';
    if (rec.R) os << *rec.R;
    os << '\n';
  }
  return os.str();
}

Field update_u2(const AdmmState& state, const Field& u_prev, double theta, double newton_tol) {
  require_same_spec(state.u1.spec(), u_prev.spec(), "update_u2");
  Field m(u_prev.spec());
  const auto n = static_cast<std::ptrdiff_t>(m.size());
  const double* u1 = state.u1.data();
  const double* u3 = state.u3.data();
  const double* up = u_prev.data();
  double* mm = m.data();
  const double rho = state.rho;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) mm[i] = rho * u1[i] + u3[i] - theta * (1.0 - 2.0 * up[i]);
  return solve_field(rho, m, &state.u2, newton_tol);
}

Field update_u1(const AdmmState& state, const Field& u_prev, double tau, const HelmholtzOperator& op) {
  Field rhs(u_prev.spec());
  const auto n = static_cast<std::ptrdiff_t>(rhs.size());
  const double* u2 = state.u2.data();
  const double* u3 = state.u3.data();
  const double* up = u_prev.data();
  double* b = rhs.data();
  const double inv_tau = 1.0 / tau;
  const double rho = state.rho;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) b[i] = inv_tau * up[i] + rho * u2[i] - u3[i];
  return op.solve(rhs);
}

Field update_u3(const AdmmState& state, double alpha) {
  Field out = state.u3;
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  const double* u1 = state.u1.data();
  const double* u2 = state.u2.data();
  double* u3 = out.data();
  const double step = alpha * state.rho;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) u3[i] += step * (u1[i] - u2[i]);
  return out;
}

double adapt_rho(const AdmmState& state, const AdmmConfig& cfg) {
  if (state.r > cfg.nu * state.s) return cfg.gamma1 * state.rho;
  if (state.s > cfg.nu * state.r) return state.rho / cfg.gamma2;
  return state.rho;
}

AdmmSolver::AdmmSolver(const ModelParams& params, const AdmmConfig& cfg)
    : params_(params),
      cfg_(cfg),
      constants_(scheme_constants(params)),
      op_(HelmholtzOperator::build(params.grid, 1.0 / params.tau + cfg.initial_rho(constants_),
                                   params.epsilon * params.epsilon)) {
  cfg_.validate();
}

StepResult AdmmSolver::solve_step(const Field& u_prev, const IterationObserver& observer,
                                  const Field* initial_multiplier) const {
  require_same_spec(u_prev.spec(), params_.grid, "solve_step");
  require_open_unit_interval(u_prev, "solve_step: previous state");

  AdmmState st;
  st.u1 = u_prev;
  st.u2 = u_prev;
  st.u3 = initial_multiplier ? *initial_multiplier : Field(u_prev.spec());
  require_same_spec(st.u3.spec(), u_prev.spec(), "solve_step: multiplier");
  st.rho = cfg_.initial_rho(constants_);
  st.k = 0;
  st.r = 0.0;
  st.s = std::numeric_limits<double>::infinity();

  HelmholtzOperator op = op_;
  IterationTrace trace;
  trace.records.push_back({0, st.rho, st.r, st.s, std::nullopt, std::nullopt});
  if (observer) observer(st);

  for (;;) {
    if (st.k >= cfg_.max_iter) {
      std::ostringstream os;
      os << "ADMM did not reach max(r,s) <= " << cfg_.gamma << " within " << cfg_.max_iter
         << " iterations (r=" << st.r << ", s=" << st.s << ")";
      throw AdmmNonconvergence(os.str(), std::move(trace));
    }
    st.u2 = update_u2(st, u_prev, params_.theta, cfg_.newton_tol);
    if (const std::size_t bad = first_outside_unit_interval(st.u2); bad < st.u2.size()) {
      throw InvariantBreach("u2 iterate left (0,1) at cell " + std::to_string(bad));
    }
    Field u1 = update_u1(st, u_prev, params_.tau, op);
    st.s = distance(u1, st.u1);
    st.u1 = std::move(u1);
    st.r = distance(st.u1, st.u2);
    st.u3 = update_u3(st, cfg_.alpha);
    ++st.k;
    trace.records.push_back({st.k, st.rho, st.r, st.s, std::nullopt, std::nullopt});
    if (observer) observer(st);

    if (!std::isfinite(st.r) || !std::isfinite(st.s)) {
      throw AdmmNonconvergence("ADMM residuals became non-finite", std::move(trace));
    }
    if (std::max(st.r, st.s) <= cfg_.gamma) break;

    if (cfg_.adaptive()) {
      const double next = adapt_rho(st, cfg_);
      if (next != st.rho) {
        st.rho = next;
        op = op.with_shift(1.0 / params_.tau + next);
      }
    }
  }
  return StepResult{std::move(st.u1), std::move(st.u3), std::move(trace)};
}

StepResult solve_step(const Field& u_prev, const ModelParams& params, const AdmmConfig& cfg) {
  return AdmmSolver(params, cfg).solve_step(u_prev);
}

}  // namespace acfh
