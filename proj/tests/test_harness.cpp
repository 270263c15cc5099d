#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "acfh/harness.hpp"
#include "support.hpp"

using namespace acfh;

namespace {

RunConfig small_config(int n = 16, double tau = 1e-3, double T = 0.01) {
  RunConfig c;
  c.params.grid = GridSpec::make(2, 2.0 * std::numbers::pi, n);
  c.params.epsilon = 0.1;
  c.params.theta = 4.0;
  c.params.tau = tau;
  c.final_time = T;
  c.validate();
  return c;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("restriction") {
    const GridSpec fine = GridSpec::make(2, 3.0, 32);
    Field lin(fine);
    for (long j = 0; j < 32; ++j)
      for (long i = 0; i < 32; ++i) lin.at(i, j) = 0.25 + 0.5 * (i + 0.5) * fine.h - 0.125 * (j + 0.5) * fine.h;
    const Field coarse = restrict_to(lin, 8);
    const double H = 3.0 / 8;
    for (long j = 0; j < 8; ++j)
      for (long i = 0; i < 8; ++i) CHECK(std::abs(coarse.at(i, j) - (0.25 + 0.5 * (i + 0.5) * H - 0.125 * (j + 0.5) * H)) <= 1e-14);

    std::mt19937_64 rng(113);
    const Field r = test::random_field(GridSpec::make(3, 1.0, 16), rng);
    CHECK(std::abs(mean(restrict_to(r, 4)) - mean(r)) <= 1e-13);
    const Field same = restrict_to(r, 16);
    for (std::size_t c = 0; c < r.size(); ++c) CHECK(same[c] == r[c]);
    CHECK_THROWS_AS(restrict_to(r, 5), ContractError);
  }

  TEST_CASE("assertion rendering") {
    const std::vector<Assertion> checks = {{"a", true, "ok"}, {"b", false, "bad"}};
    const std::string text = render_assertions(checks);
    CHECK(text.find("PASS a") != std::string::npos);
    CHECK(text.find("FAIL b") != std::string::npos);
    CHECK_FALSE(all_passed(checks));
    CHECK(all_passed({{"a", true, ""}}));
    CHECK(parse_study_kind("temporal") == StudyKind::temporal);
    CHECK_THROWS_AS(parse_study_kind("rate"), ConfigError);
  }

  TEST_CASE("small spatial study") {
    RunConfig c = small_config(16, 1e-3, 0.01);
    c.study.ladder = {8, 16};
    c.study.reference = 32;
    const RateTable t = spatial_study(c);
    REQUIRE(t.rows.size() == 2u);
    CHECK_FALSE(t.rows[0].rate.has_value());
    REQUIRE(t.rows[1].rate.has_value());
    CHECK(t.rows[0].error > t.rows[1].error);
    CHECK(t.rows[1].error > 0.0);
    CHECK(t.to_csv().rfind("resolution,error,rate\n", 0) == 0);
    CHECK(spatial_study(c).to_csv() == t.to_csv());

    c.study.ladder = {12};
    CHECK_THROWS_AS(spatial_study(c), ConfigError);
  }

  TEST_CASE("temporal ladder of length one") {
    RunConfig c = small_config(16, 0.02, 0.04);
    c.study.ladder = {0.02};
    c.study.reference = 0.005;
    const RateTable t = temporal_study(c);
    REQUIRE(t.rows.size() == 1u);
    CHECK_FALSE(t.rows[0].rate.has_value());
    CHECK(t.rows[0].error > 0.0);
    CHECK(t.rates().empty());
  }

  TEST_CASE("assess_rates") {
    RateTable t;
    t.kind = StudyKind::spatial;
    t.rows = {{0.4, 1e-2, std::nullopt}, {0.2, 2.5e-3, 2.0}, {0.1, 1e-3, 1.32}};
    const auto checks = assess_rates(t, 1.85, 2.15);
    CHECK_FALSE(all_passed(checks));
    t.rows[2].rate = 2.1;
    CHECK(all_passed(assess_rates(t, 1.85, 2.15)));
  }

  TEST_CASE("rate study on a small grid") {
    RunConfig c = small_config(16, 1e-3, 0.01);
    c.admm.rho_policy = RhoPolicy::optimal;
    const RateReport rep = rate_study(c);
    REQUIRE(rep.cases.size() == 3u);
    CHECK(all_passed(rep.checks));
    for (const auto& rc : rep.cases) {
      CHECK(rc.observed <= rc.bound + kRateSlack);
      CHECK(rc.window >= 1);
      CHECK(rc.bound == doctest::Approx(1.0 / (1.0 + rc.delta)));
    }
    CHECK(rep.cases[1].delta == doctest::Approx(rep.constants.delta_max).epsilon(1e-12));

    RunConfig flat = c;
    flat.params.epsilon = 0.0;
    flat.params.tau = 1.0;
    flat.final_time = 2.0;
    const RateReport half = rate_study(flat, {1.0});
    REQUIRE(half.cases.size() == 1u);
    CHECK(half.cases[0].delta == 1.0);
    CHECK(half.cases[0].observed <= 0.5 + kRateSlack);
  }

  TEST_CASE("phi sweep on a small grid") {
    RunConfig c = small_config(8, 1e-3, 0.01);
    c.admm.rho_policy = RhoPolicy::optimal;
    c.initial_condition = InitialCondition::uniform_random;
    c.ic_offset = 0.05;
    c.ic_amplitude = 0.9;
    c.seed = 3;
    c.study.alphas = {0.5, 1.0, 1.6};
    const PhiReport rep = phi_sweep(c, 1);
    CHECK(all_passed(rep.checks));
    REQUIRE(rep.cases.size() == 4u);
    CHECK_FALSE(rep.cases.back().asserted);
    CHECK(rep.cases.back().alpha == kPhiProbeAlpha);
    for (const auto& pc : rep.cases)
      if (pc.asserted) {
        CHECK(pc.converged);
        CHECK(pc.worst_increase <= kPhiSlack);
        CHECK(pc.worst_bound_gap <= kPhiSlack);
      }
  }

  TEST_CASE("diagnose") {
    RunConfig c = small_config(8, 1e-3, 0.01);
    CHECK_THROWS_AS(diagnose(c, 2), ConfigError);
    c.admm.rho_policy = RhoPolicy::fixed;
    CHECK_THROWS_AS(diagnose(c, 0), ConfigError);
    CHECK_THROWS_AS(diagnose(c, 11), ConfigError);
    const DiagnoseResult res = diagnose(c, 2);
    REQUIRE(res.trace.records.size() >= 2u);
    CHECK(res.trace.records.front().phi.has_value());
    CHECK(res.trace.records.back().R.has_value());
    CHECK(*res.trace.records.back().R < *res.trace.records.front().R);
    CHECK(res.residual < 1e-3);
  }

  TEST_CASE("state before a step") {
    RunConfig c = small_config(8, 1e-3, 0.01);
    const Field u0 = state_before_step(c, 1);
    const Field ic = make_initial_condition(c);
    for (std::size_t i = 0; i < ic.size(); ++i) CHECK(u0[i] == ic[i]);
    const Field u1 = state_before_step(c, 2);
    const Field ref = reference_step(u0, c.params);
    CHECK(distance(u1, ref) <= 1e-6);
  }
}
