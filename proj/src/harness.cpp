#include "acfh/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>

namespace acfh {

Field restrict_to(const Field& fine, int n_coarse) {
  const GridSpec& fs = fine.spec();
  if (n_coarse < 2 || fs.n % n_coarse != 0) {
    throw ContractError("restrict_to: " + std::to_string(n_coarse) + " does not divide " + std::to_string(fs.n));
  }
  const GridSpec cs = GridSpec::make(fs.dim, fs.length, n_coarse);
  const long ratio = fs.n / n_coarse;
  const long nk = fs.dim == 3 ? n_coarse : 1;
  const long bk = fs.dim == 3 ? ratio : 1;
  const double weight = 1.0 / static_cast<double>(fs.dim == 3 ? ratio * ratio * ratio : ratio * ratio);
  Field out(cs);
  for (long k = 0; k < nk; ++k)
    for (long j = 0; j < n_coarse; ++j)
      for (long i = 0; i < n_coarse; ++i) {
        double sum = 0.0;
        for (long c = 0; c < bk; ++c)
          for (long b = 0; b < ratio; ++b)
            for (long a = 0; a < ratio; ++a) sum += fine.at(i * ratio + a, j * ratio + b, k * bk + c);
        out.at(i, j, k) = sum * weight;
      }
  return out;
}

std::string render_assertions(const std::vector<Assertion>& checks) {
  std::string out;
  for (const auto& c : checks) {
    out += (c.passed ? "PASS " : "FAIL ") + c.name;
    if (!c.detail.empty()) out += ": " + c.detail;
    out += '\n';
  }
  return out;
}

bool all_passed(const std::vector<Assertion>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Assertion& a) { return a.passed; });
}

std::string to_string(StudyKind kind) { return kind == StudyKind::spatial ? "spatial" : "temporal"; }

StudyKind parse_study_kind(const std::string& s) {
  if (s == "spatial") return StudyKind::spatial;
  if (s == "temporal") return StudyKind::temporal;
  throw ConfigError("study kind must be spatial or temporal, got '" + s + "'");
}

namespace {

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

RunConfig quiet(RunConfig cfg) {
  cfg.output_dir.clear();
  cfg.snapshot_times.clear();
  return cfg;
}

void fill_rates(RateTable& t) {
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const RateRow& a = t.rows[i - 1];
    RateRow& b = t.rows[i];
    b.rate = std::log(a.error / b.error) / std::log(a.resolution / b.resolution);
  }
}

void require_strictly_monotone(const std::vector<double>& v, bool decreasing, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (decreasing ? !(v[i] < v[i - 1]) : !(v[i] > v[i - 1])) {
      throw ConfigError(std::string(what) + " ladder must be strictly monotone");
    }
  }
}

}  // namespace

std::string RateTable::to_csv() const {
  std::string out = "resolution,error,rate\n";
  for (const auto& r : rows) {
    out += fmt(r.resolution, "%.17g") + "," + fmt(r.error, "%.17g") + ",";
    if (r.rate) out += fmt(*r.rate, "%.17g");
    out += '\n';
  }
  return out;
}

std::vector<double> RateTable::rates() const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.rate) out.push_back(*r.rate);
  return out;
}

RateTable spatial_study(const RunConfig& cfg_in) {
  const RunConfig cfg = quiet(cfg_in);
  std::vector<double> ladder = cfg.study.ladder.empty() ? std::vector<double>{16, 32, 64} : cfg.study.ladder;
  const int ref_n = cfg.study.reference > 0.0 ? static_cast<int>(cfg.study.reference) : 256;
  require_strictly_monotone(ladder, false, "spatial");
  for (double n : ladder) {
    if (n != std::floor(n) || n < 2 || static_cast<int>(n) >= ref_n || ref_n % static_cast<int>(n) != 0) {
      throw ConfigError("spatial ladder entries must be integers dividing and below the reference N");
    }
  }
  auto launch = [&cfg](int n) {
    return std::async(std::launch::async, [cfg, n] {
      RunConfig c = cfg;
      c.params.grid = GridSpec::make(c.params.grid.dim, c.params.grid.length, n);
      return run_to_end(c);
    });
  };
  auto ref_job = launch(ref_n);
  std::vector<std::future<RunOutcome>> jobs;
  for (double n : ladder) jobs.push_back(launch(static_cast<int>(n)));

  const RunOutcome ref = ref_job.get();
  RateTable t;
  t.kind = StudyKind::spatial;
  t.reference = ref_n;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const RunOutcome out = jobs[i].get();
    const Field restricted = restrict_to(ref.final_state, static_cast<int>(ladder[i]));
    RateRow row;
    row.resolution = out.final_state.spec().h;
    row.error = distance(out.final_state, restricted);
    row.steps = static_cast<int>(out.diagnostics.records.size()) - 1;
    row.iterations = out.diagnostics.total_iterations();
    t.rows.push_back(row);
  }
  fill_rates(t);
  return t;
}

RateTable temporal_study(const RunConfig& cfg_in) {
  const RunConfig cfg = quiet(cfg_in);
  std::vector<double> ladder =
      cfg.study.ladder.empty() ? std::vector<double>{0.02, 0.01, 0.005} : cfg.study.ladder;
  const double ref_tau = cfg.study.reference > 0.0 ? cfg.study.reference : 0.02 / 64.0;
  require_strictly_monotone(ladder, true, "temporal");
  if (!(ref_tau < ladder.back())) throw ConfigError("reference tau must be smaller than every ladder entry");

  auto launch = [&cfg](double tau) {
    return std::async(std::launch::async, [cfg, tau] {
      RunConfig c = cfg;
      c.params.tau = tau;
      c.validate();
      return run_to_end(c);
    });
  };
  auto ref_job = launch(ref_tau);
  std::vector<std::future<RunOutcome>> jobs;
  for (double tau : ladder) jobs.push_back(launch(tau));

  const RunOutcome ref = ref_job.get();
  RateTable t;
  t.kind = StudyKind::temporal;
  t.reference = ref_tau;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const RunOutcome out = jobs[i].get();
    RateRow row;
    row.resolution = ladder[i];
    row.error = distance(out.final_state, ref.final_state);
    row.steps = static_cast<int>(out.diagnostics.records.size()) - 1;
    row.iterations = out.diagnostics.total_iterations();
    t.rows.push_back(row);
  }
  fill_rates(t);
  return t;
}

std::vector<Assertion> assess_rates(const RateTable& table, double lo, double hi) {
  std::vector<Assertion> out;
  for (const auto& row : table.rows) {
    if (!(row.error > 0.0) || !std::isfinite(row.error)) {
      out.push_back({"error at " + fmt(row.resolution) + " positive", false, fmt(row.error)});
    }
    if (!row.rate) continue;
    const bool near_ref = table.kind == StudyKind::temporal && row.resolution < 16.0 * table.reference * (1 - 1e-12);
    Assertion a;
    a.name = to_string(table.kind) + " rate at " + fmt(row.resolution) + " in [" + fmt(lo) + ", " + fmt(hi) + "]";
    a.passed = std::isfinite(*row.rate) && *row.rate >= lo && *row.rate <= hi;
    a.detail = "observed " + fmt(*row.rate, "%.4f");
    if (near_ref) {
      a.name += " (informational, close to reference)";
      a.passed = true;
    }
    out.push_back(a);
  }
  return out;
}

Field state_before_step(const RunConfig& cfg_in, int step) {
  if (step < 1) throw ConfigError("step must be at least 1");
  if (step > cfg_in.steps()) {
    throw ConfigError("step " + std::to_string(step) + " is beyond the run's " + std::to_string(cfg_in.steps()) +
                      " steps");
  }
  RunConfig cfg = quiet(cfg_in);
  if (step == 1) return make_initial_condition(cfg);
  cfg.final_time = (step - 1) * cfg.params.tau;
  return run_to_end(cfg).final_state;
}

Field reference_step(const Field& u_prev, const ModelParams& params) {
  return oracle::solve_reference_detailed(u_prev, params).u;
}

namespace {

struct MonitoredSolve {
  std::vector<PhiRRecord> records;
  int iterations = 0;
  bool converged = false;
  IterationTrace trace;
};

MonitoredSolve monitored_solve(const Field& u_prev, const Field& u_star, const ModelParams& params, AdmmConfig admm,
                               double rho) {
  admm.rho_policy = RhoPolicy::fixed;
  admm.rho0 = rho;
  admm.carry_multiplier = false;
  PhiRMonitor monitor(u_star, u_prev, params, admm.alpha, rho);
  const AdmmSolver solver(params, admm);
  MonitoredSolve out;
  try {
    StepResult res = solver.solve_step(u_prev, monitor.observer());
    out.converged = true;
    out.trace = std::move(res.trace);
  } catch (const AdmmNonconvergence& e) {
    out.trace = e.trace();
  }
  out.iterations = out.trace.iterations();
  out.records = monitor.records();
  return out;
}

}  // namespace

std::string RateReport::to_csv() const {
  std::string out = "rho,delta,bound,observed,window,iterations\n";
  for (const auto& c : cases) {
    out += fmt(c.rho, "%.17g") + "," + fmt(c.delta, "%.17g") + "," + fmt(c.bound, "%.17g") + "," +
           fmt(c.observed, "%.17g") + "," + std::to_string(c.window) + "," + std::to_string(c.iterations) + "\n";
  }
  return out;
}

std::string RateReport::summary() const {
  std::string out = "mu1 = " + fmt(constants.mu1) + ", L1 = " + fmt(constants.L1) + ", rho_opt = " +
                    fmt(constants.rho_opt) + ", delta_max = " + fmt(constants.delta_max) + "\n";
  return out + render_assertions(checks);
}

RateReport rate_study(const RunConfig& cfg, const std::vector<double>& rhos_in, double alpha) {
  RateReport rep;
  rep.constants = scheme_constants(cfg.params);
  std::vector<double> rhos = rhos_in;
  if (rhos.empty()) {
    for (double f : cfg.study.rho_factors) rhos.push_back(f * rep.constants.rho_opt);
  }
  const Field u_prev = state_before_step(cfg, cfg.study.step);
  const Field u_star = reference_step(u_prev, cfg.params);

  AdmmConfig admm = cfg.admm;
  admm.alpha = alpha;
  admm.gamma = std::min(admm.gamma, 1e-13);
  admm.max_iter = std::max(admm.max_iter, 5000);
  for (double rho : rhos) {
    MonitoredSolve solve = monitored_solve(u_prev, u_star, cfg.params, admm, rho);
    RateCase c;
    c.rho = rho;
    c.delta = rep.constants.delta(rho);
    c.bound = 1.0 / (1.0 + c.delta);
    c.iterations = solve.iterations;
    const double floor = kRateWindowFloor * solve.records.front().R;
    for (std::size_t k = 0; k + 1 < solve.records.size(); ++k) {
      const double next = solve.records[k + 1].R;
      if (!(next >= floor)) break;
      c.observed = std::max(c.observed, next / solve.records[k].R);
      ++c.window;
    }
    c.records = std::move(solve.records);
    Assertion a;
    a.name = "R contraction at rho = " + fmt(rho);
    if (alpha == 1.0) {
      a.passed = c.window > 0 && c.observed <= c.bound + kRateSlack;
      a.detail = "max ratio " + fmt(c.observed, "%.6f") + " vs bound 1/(1+delta) = " + fmt(c.bound, "%.6f") +
                 " over " + std::to_string(c.window) + " iterations";
    } else {
      a.name += " (alpha = " + fmt(alpha) + ", informational)";
      a.passed = true;
      a.detail = "max ratio " + fmt(c.observed, "%.6f") + " (bound proven only at alpha = 1)";
    }
    rep.checks.push_back(a);
    rep.cases.push_back(std::move(c));
  }
  return rep;
}

std::string PhiReport::to_csv() const {
  std::string out = "alpha,seed,asserted,converged,iterations,worst_increase,worst_bound_gap\n";
  for (const auto& c : cases) {
    out += fmt(c.alpha, "%.17g") + "," + std::to_string(c.seed) + "," + (c.asserted ? "1" : "0") + "," +
           (c.converged ? "1" : "0") + "," + std::to_string(c.iterations) + "," + fmt(c.worst_increase, "%.17g") +
           "," + fmt(c.worst_bound_gap, "%.17g") + "\n";
  }
  return out;
}

std::string PhiReport::summary() const { return "rho = " + fmt(rho) + "\n" + render_assertions(checks); }

PhiReport phi_sweep(const RunConfig& cfg, int instances) {
  PhiReport rep;
  const SchemeConstants constants = scheme_constants(cfg.params);
  rep.rho = cfg.admm.rho0.value_or(constants.rho_opt);

  std::vector<double> alphas = cfg.study.alphas;
  alphas.push_back(kPhiProbeAlpha);

  for (int inst = 0; inst < instances; ++inst) {
    RunConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(inst);
    const Field u_prev = state_before_step(c, cfg.study.step);
    const Field u_star = reference_step(u_prev, cfg.params);
    for (double alpha : alphas) {
      const bool probe = alpha >= kGoldenRatio;
      AdmmConfig admm = cfg.admm;
      admm.alpha = alpha;
      admm.allow_unsafe_alpha = probe;
      admm.gamma = std::min(admm.gamma, 1e-10);
      admm.max_iter = probe ? 2000 : std::max(admm.max_iter, 5000);
      MonitoredSolve solve = monitored_solve(u_prev, u_star, cfg.params, admm, rep.rho);

      PhiCase pc;
      pc.alpha = alpha;
      pc.seed = c.seed;
      pc.asserted = !probe;
      pc.converged = solve.converged;
      pc.iterations = solve.iterations;
      pc.worst_increase = -std::numeric_limits<double>::infinity();
      pc.worst_bound_gap = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k < solve.records.size(); ++k) {
        const PhiRRecord& prev = solve.records[k - 1];
        const PhiRRecord& cur = solve.records[k];
        const double decrement = prev.phi - cur.phi;
        pc.worst_increase = std::max(pc.worst_increase, -decrement);
        pc.worst_bound_gap = std::max(pc.worst_bound_gap, phi_decrement_bound(cur, alpha) - decrement);
      }
      pc.records = std::move(solve.records);

      const std::string tag = "alpha = " + fmt(alpha) + ", seed " + std::to_string(c.seed);
      if (pc.asserted) {
        rep.checks.push_back({"Phi nonincreasing, " + tag, pc.worst_increase <= kPhiSlack,
                              "max increase " + fmt(pc.worst_increase, "%.3e")});
        rep.checks.push_back({"Phi decrement bound, " + tag, pc.worst_bound_gap <= kPhiSlack,
                              "max shortfall " + fmt(pc.worst_bound_gap, "%.3e")});
      } else {
        rep.checks.push_back({"Phi probe (not asserted), " + tag, true,
                              std::string(pc.converged ? "converged" : "did not converge") + " in " +
                                  std::to_string(pc.iterations) + " iterations, max increase " +
                                  fmt(pc.worst_increase, "%.3e")});
      }
      rep.cases.push_back(std::move(pc));
    }
  }
  return rep;
}

DiagnoseResult diagnose(const RunConfig& cfg, int step) {
  if (cfg.admm.adaptive()) {
    throw ConfigError("diagnose needs a fixed penalty: set rho_policy = fixed or optimal, or pass --rho");
  }
  const SchemeConstants constants = scheme_constants(cfg.params);
  const double rho = cfg.admm.initial_rho(constants);
  const Field u_prev = state_before_step(cfg, step);
  const Field u_star = reference_step(u_prev, cfg.params);
  AdmmConfig admm = cfg.admm;
  PhiRMonitor monitor(u_star, u_prev, cfg.params, admm.alpha, rho);
  admm.rho_policy = RhoPolicy::fixed;
  admm.rho0 = rho;
  const AdmmSolver solver(cfg.params, admm);
  StepResult res = solver.solve_step(u_prev, monitor.observer());
  attach_phi_r(res.trace, monitor.records());
  DiagnoseResult out;
  out.residual = scheme_residual(res.u_next, u_prev, cfg.params);
  out.trace = std::move(res.trace);
  return out;
}

}  // namespace acfh
