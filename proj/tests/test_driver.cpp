#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "acfh/driver.hpp"
#include "acfh/snapshot.hpp"
#include "support.hpp"

using namespace acfh;

namespace {

RunConfig base_config(int n = 16, double tau = 1e-2, double T = 0.05) {
  RunConfig c;
  c.params.grid = GridSpec::make(2, 2.0 * std::numbers::pi, n);
  c.params.epsilon = 0.1;
  c.params.theta = 4.0;
  c.params.tau = tau;
  c.final_time = T;
  c.validate();
  return c;
}

std::string strip_wall(const std::string& csv) {
  std::istringstream is(csv);
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line)) os << line.substr(0, line.rfind(',')) << "\n";
  return os.str();
}

}  // namespace

TEST_SUITE("driver") {
  TEST_CASE("SplitMix64 reference values") {
    SplitMix64 g(0);
    CHECK(g.next() == 0xe220a8397b1dcdafull);
    CHECK(g.next() == 0x6e789e6aa1b965f4ull);
    SplitMix64 u(1234);
    for (int i = 0; i < 1000; ++i) {
      const double v = u.next_unit();
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
    }
  }

  TEST_CASE("initial conditions") {
    RunConfig c = base_config(64);
    const Field s = make_initial_condition(c);
    CHECK(reduce_min(s) >= 0.25);
    CHECK(reduce_max(s) <= 0.75);
    CHECK(reduce_max(s) >= 0.75 - 0.25 * std::pow(std::sin(c.params.grid.h / 2), 2) * 2.0 - 1e-15);
    CHECK(s.at(0, 0) == doctest::Approx(0.5 + 0.25 * std::pow(std::sin(c.params.grid.h / 2), 2)));

    c.initial_condition = InitialCondition::uniform_random;
    c.ic_offset = 0.01;
    c.ic_amplitude = 0.98;
    c.seed = 42;
    const Field a = make_initial_condition(c);
    const Field b = make_initial_condition(c);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    CHECK(reduce_min(a) > 0.01);
    CHECK(reduce_max(a) < 0.99);
    SplitMix64 g(42);
    CHECK(a[0] == 0.01 + 0.98 * g.next_unit());
    c.seed = 43;
    CHECK(make_initial_condition(c)[0] != a[0]);

    c.ic_offset = 0.0;
    CHECK_THROWS_AS(make_initial_condition(c), ConfigError);
  }

  TEST_CASE("custom snapshot initial condition") {
    const auto dir = test::scratch_dir("driver_ic");
    RunConfig c = base_config(8);
    Field u(c.params.grid, 0.3);
    u[5] = 0.6;
    save_snapshot(dir / "init.acfh", u);
    c.initial_condition = InitialCondition::custom_snapshot;
    c.ic_snapshot = dir / "init.acfh";
    const Field v = make_initial_condition(c);
    CHECK(v[5] == 0.6);
    save_snapshot(dir / "other.acfh", Field(GridSpec::make(2, 2.0 * std::numbers::pi, 16), 0.3));
    c.ic_snapshot = dir / "other.acfh";
    CHECK_THROWS_AS(make_initial_condition(c), ConfigError);
  }

  TEST_CASE("uniform one half run") {
    RunConfig c = base_config(16, 1e-2, 0.05);
    const Field half(c.params.grid, 0.5);
    RunHooks hooks;
    hooks.initial = &half;
    const RunOutcome out = run_to_end(c, hooks);
    REQUIRE(out.diagnostics.records.size() == 6u);
    for (const auto& r : out.diagnostics.records) {
      CHECK(r.energy == out.diagnostics.initial_energy());
      CHECK(r.umin == doctest::Approx(0.5).epsilon(1e-14));
      CHECK(r.umax == doctest::Approx(0.5).epsilon(1e-14));
      if (r.step > 0) CHECK(r.iters <= 2);
    }
    for (double v : out.final_state.values()) CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
  }

  TEST_CASE("energy dissipation and bounds on a random run") {
    RunConfig c = base_config(32, 0.1, 1.0);
    c.params.theta = 3.0;
    c.params.epsilon = 0.05;
    c.params.grid = GridSpec::make(2, 2.0, 32);
    c.initial_condition = InitialCondition::uniform_random;
    c.ic_offset = 0.01;
    c.ic_amplitude = 0.98;
    c.seed = 5;
    const RunDiagnostics d = run(c);
    const double slack = kEnergySlack * std::abs(d.initial_energy());
    for (std::size_t i = 1; i < d.records.size(); ++i) {
      CHECK(d.records[i].energy <= d.records[i - 1].energy + slack);
      CHECK(d.records[i].dissipation_margin >= -slack);
      CHECK(d.records[i].umin > 0.0);
      CHECK(d.records[i].umax < 1.0);
      CHECK(d.records[i].u2_min > 0.0);
      CHECK(d.records[i].u2_max < 1.0);
      CHECK(d.records[i].iters <= 300);
    }
  }

  TEST_CASE("determinism and CSV round trip") {
    RunConfig c = base_config(16, 1e-2, 0.03);
    c.initial_condition = InitialCondition::uniform_random;
    c.ic_offset = 0.3;
    c.ic_amplitude = 0.4;
    c.seed = 11;
    const RunDiagnostics a = run(c);
    const RunDiagnostics b = run(c);
    CHECK(strip_wall(a.to_csv()) == strip_wall(b.to_csv()));
    CHECK(a.to_csv().rfind("step,time,iters,energy,umin,umax,wall_ms\n", 0) == 0);

    const RunDiagnostics back = RunDiagnostics::from_csv(a.to_csv());
    REQUIRE(back.records.size() == a.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(back.records[i].step == a.records[i].step);
      CHECK(back.records[i].time == a.records[i].time);
      CHECK(back.records[i].iters == a.records[i].iters);
      CHECK(back.records[i].energy == a.records[i].energy);
      CHECK(back.records[i].umin == a.records[i].umin);
      CHECK(back.records[i].umax == a.records[i].umax);
    }
    CHECK(a.total_iterations() > 0);
    CHECK(a.max_iterations() <= a.total_iterations());
    CHECK_THROWS_AS(RunDiagnostics::from_csv("step,time\n1,2\n"), ParseError);
    CHECK_THROWS_AS(RunDiagnostics::from_csv("step,time,iters,energy,umin,umax,wall_ms\n1,x,3,4,5,6,7\n"), ParseError);
  }

  TEST_CASE("snapshots") {
    RunConfig c = base_config(16, 1e-2, 0.05);
    c.snapshot_times = {0.0, 0.025, 0.05, 0.0299};
    CHECK(snapshot_steps(c) == std::vector<int>{0, 2, 5});
    CHECK(snapshot_path("/x", 12).filename() == "snapshot_000012.acfh");

    c.output_dir = test::scratch_dir("driver_snap");
    Field last;
    RunHooks hooks;
    hooks.on_step = [&](const StepRecord&, const Field& u) { last = u; };
    const RunDiagnostics d = run(c, hooks);
    CHECK(std::filesystem::exists(c.output_dir / "diagnostics.csv"));
    for (int s : {0, 2, 5}) CHECK(std::filesystem::exists(snapshot_path(c.output_dir, s)));
    const Field final_snap = load_snapshot(snapshot_path(c.output_dir, 5));
    for (std::size_t i = 0; i < last.size(); ++i) CHECK(final_snap[i] == last[i]);
    std::ifstream in(c.output_dir / "diagnostics.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(RunDiagnostics::from_csv(ss.str()).records.size() == d.records.size());
  }

  TEST_CASE("partial diagnostics are flushed on failure") {
    RunConfig c = base_config(16, 1e-2, 0.05);
    c.admm.max_iter = 1;
    c.output_dir = test::scratch_dir("driver_fail");
    CHECK_THROWS_AS(run(c), ConvergenceError);
    std::ifstream in(c.output_dir / "diagnostics.csv");
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    const RunDiagnostics partial = RunDiagnostics::from_csv(ss.str());
    CHECK(partial.records.size() == 1u);
    CHECK(partial.records[0].step == 0);
  }
}
