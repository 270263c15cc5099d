#include "acfh/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "acfh/snapshot.hpp"

namespace acfh {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

Field make_initial_condition(const RunConfig& cfg) {
  cfg.validate();
  const GridSpec& s = cfg.params.grid;
  Field u(s);
  switch (cfg.initial_condition) {
    case InitialCondition::sine: {
      const long n = s.n;
      const long nk = s.dim == 3 ? n : 1;
      std::vector<double> wave(n);
      for (long i = 0; i < n; ++i) wave[i] = std::sin(2.0 * std::numbers::pi * (i + 0.5) * s.h / s.length);
      for (long k = 0; k < nk; ++k)
        for (long j = 0; j < n; ++j)
          for (long i = 0; i < n; ++i) {
            double p = wave[i] * wave[j];
            if (s.dim == 3) p *= wave[k];
            u.at(i, j, k) = cfg.ic_offset + cfg.ic_amplitude * p;
          }
      break;
    }
    case InitialCondition::uniform_random: {
      SplitMix64 rng(cfg.seed);
      for (std::size_t c = 0; c < u.size(); ++c) u[c] = cfg.ic_offset + cfg.ic_amplitude * rng.next_unit();
      break;
    }
    case InitialCondition::custom_snapshot: {
      Field loaded = load_snapshot(cfg.ic_snapshot);
      if (!(loaded.spec() == s)) {
        throw ConfigError("ic_snapshot grid " + describe(loaded.spec()) + " does not match config grid " +
                          describe(s));
      }
      u = std::move(loaded);
      break;
    }
  }
  if (const std::size_t bad = first_outside_unit_interval(u); bad < u.size()) {
    throw ConfigError("initial condition leaves (0,1) at cell " + std::to_string(bad));
  }
  return u;
}

double RunDiagnostics::initial_energy() const { return records.empty() ? 0.0 : records.front().energy; }

int RunDiagnostics::total_iterations() const {
  int total = 0;
  for (const auto& r : records) total += r.iters;
  return total;
}

int RunDiagnostics::max_iterations() const {
  int m = 0;
  for (const auto& r : records) m = std::max(m, r.iters);
  return m;
}

std::string RunDiagnostics::to_csv() const {
  std::string out = "step,time,iters,energy,umin,umax,wall_ms\n";
  char line[256];
  for (const auto& r : records) {
    std::snprintf(line, sizeof line, "%d,%.17g,%d,%.17g,%.17g,%.17g,%.3f\n", r.step, r.time, r.iters, r.energy,
                  r.umin, r.umax, r.wall_ms);
    out += line;
  }
  return out;
}

RunDiagnostics RunDiagnostics::from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "step,time,iters,energy,umin,umax,wall_ms") {
    throw ParseError("diagnostics CSV header mismatch", 0);
  }
  RunDiagnostics d;
  std::size_t offset = line.size() + 1;
  while (std::getline(is, line)) {
    if (line.empty()) {
      offset += 1;
      continue;
    }
    StepRecord r;
    int used = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%d,%lf,%lf,%lf,%lf%n", &r.step, &r.time, &r.iters, &r.energy, &r.umin,
                    &r.umax, &r.wall_ms, &used) != 7 ||
        static_cast<std::size_t>(used) != line.size()) {
      throw ParseError("malformed diagnostics row", offset);
    }
    d.records.push_back(r);
    offset += line.size() + 1;
  }
  return d;
}

void RunDiagnostics::save_csv(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << to_csv();
}

std::vector<int> snapshot_steps(const RunConfig& cfg) {
  std::vector<int> out;
  for (double t : cfg.snapshot_times) {
    const int n = std::min(cfg.steps(), static_cast<int>(std::floor(t / cfg.params.tau + 1e-9)));
    out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::filesystem::path snapshot_path(const std::filesystem::path& dir, int step) {
  char name[64];
  std::snprintf(name, sizeof name, "snapshot_%06d.acfh", step);
  return dir / name;
}

namespace {

StepRecord describe_state(const Field& u, const ModelParams& params, int step, double time) {
  StepRecord rec;
  rec.step = step;
  rec.time = time;
  rec.energy = discrete_energy(u, params);
  rec.umin = reduce_min(u);
  rec.umax = reduce_max(u);
  rec.u2_min = rec.umin;
  rec.u2_max = rec.umax;
  return rec;
}

}  // namespace

RunOutcome run_to_end(const RunConfig& cfg, const RunHooks& hooks) {
  cfg.validate();
  const ModelParams& params = cfg.params;
  const bool persist = !cfg.output_dir.empty();
  if (persist) std::filesystem::create_directories(cfg.output_dir);

  RunOutcome out;
  RunDiagnostics& diag = out.diagnostics;
  auto flush = [&] {
    if (persist) diag.save_csv(cfg.output_dir / "diagnostics.csv");
  };

  const std::vector<int> snaps = snapshot_steps(cfg);
  auto maybe_snapshot = [&](int step, const Field& u) {
    if (persist && std::binary_search(snaps.begin(), snaps.end(), step)) {
      save_snapshot(snapshot_path(cfg.output_dir, step), u);
    }
  };

  Field u = hooks.initial ? *hooks.initial : make_initial_condition(cfg);
  require_same_spec(u.spec(), params.grid, "run: initial state");
  if (const std::size_t bad = first_outside_unit_interval(u); bad < u.size()) {
    throw InvariantBreach("initial state outside (0,1) at cell " + std::to_string(bad));
  }

  diag.records.push_back(describe_state(u, params, 0, 0.0));
  if (hooks.on_step) hooks.on_step(diag.records.back(), u);
  maybe_snapshot(0, u);
  const double e0 = diag.initial_energy();
  const double slack = kEnergySlack * std::abs(e0);

  const AdmmSolver solver(params, cfg.admm);
  std::optional<Field> multiplier;
  const int steps = cfg.steps();
  try {
    for (int n = 1; n <= steps; ++n) {
      double u2_min = 1.0;
      double u2_max = 0.0;
      const IterationObserver watch = [&](const AdmmState& st) {
        if (st.k == 0) return;
        u2_min = std::min(u2_min, reduce_min(st.u2));
        u2_max = std::max(u2_max, reduce_max(st.u2));
      };
      const auto t0 = std::chrono::steady_clock::now();
      StepResult res = solver.solve_step(u, watch, multiplier ? &*multiplier : nullptr);
      const auto t1 = std::chrono::steady_clock::now();

      const double change = distance(res.u_next, u);
      StepRecord rec = describe_state(res.u_next, params, n, n * params.tau);
      rec.iters = res.trace.iterations();
      rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      rec.u2_min = u2_min;
      rec.u2_max = u2_max;
      const double e_prev = diag.records.back().energy;
      rec.dissipation_margin = e_prev - rec.energy - change * change / (2.0 * params.tau);
      diag.records.push_back(rec);

      if (!(rec.umin > 0.0 && rec.umax < 1.0)) {
        throw InvariantBreach("step " + std::to_string(n) + " left (0,1): min " + std::to_string(rec.umin) +
                              ", max " + std::to_string(rec.umax));
      }
      if (rec.energy > e_prev + slack) {
        std::ostringstream os;
        os.precision(17);
        os << "energy increased at step " << n << " from " << e_prev << " to " << rec.energy
           << "; the ADMM tolerance gamma=" << cfg.admm.gamma << " is likely too loose, try a smaller gamma";
        throw InvariantBreach(os.str());
      }

      u = std::move(res.u_next);
      if (cfg.admm.carry_multiplier) multiplier = std::move(res.multiplier);
      if (hooks.on_step) hooks.on_step(rec, u);
      maybe_snapshot(n, u);
    }
  } catch (...) {
    flush();
    throw;
  }
  flush();
  out.final_state = std::move(u);
  return out;
}

RunDiagnostics run(const RunConfig& cfg, const RunHooks& hooks) { return run_to_end(cfg, hooks).diagnostics; }

}  // namespace acfh
