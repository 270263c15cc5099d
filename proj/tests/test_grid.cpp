#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <numbers>
#include <random>

#include "acfh/grid.hpp"
#include "support.hpp"

using namespace acfh;
using acfh::test::random_edge_field;
using acfh::test::random_field;

TEST_SUITE("grid") {
  TEST_CASE("GridSpec validation and derived quantities") {
    const GridSpec s = GridSpec::make(2, 2.0 * std::numbers::pi, 64);
    CHECK(s.cells() == 64u * 64u);
    CHECK(std::abs(s.h * s.n - s.length) <= std::nextafter(s.length, 10.0) - s.length);
    CHECK(s.cell_volume() == doctest::Approx(s.h * s.h));
    CHECK_THROWS_AS(GridSpec::make(1, 1.0, 8), ContractError);
    CHECK_THROWS_AS(GridSpec::make(4, 1.0, 8), ContractError);
    CHECK_THROWS_AS(GridSpec::make(2, 1.0, 1), ContractError);
    CHECK_THROWS_AS(GridSpec::make(2, -1.0, 8), ContractError);
    CHECK(GridSpec::make(3, 1.0, 4).cells() == 64u);
  }

  TEST_CASE("periodic indexing") {
    const GridSpec s = GridSpec::make(3, 1.0, 5);
    Field f(s);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i);
    CHECK(f.at(1, 2, 3) == f.at(1 + 5, 2 - 10, 3 + 15));
    CHECK(f.index(-1, 0, 0) == f.index(4, 0, 0));
    CHECK(f.index(2, 3, 4) == 2u + 5u * (3u + 5u * 4u));
  }

  TEST_CASE("gradient examples") {
    const GridSpec s = GridSpec::make(2, 2.0, 2);  // h = 1
    Field c(s, 3.5);
    const EdgeField gc = gradient(c);
    for (const auto& comp : gc.components)
      for (double v : comp.values()) CHECK(v == 0.0);

    Field phi(s, std::vector<double>{0.0, 1.0, 1.0, 0.0});
    const EdgeField g = gradient(phi);
    CHECK(g.components.size() == 2);
    CHECK(g.components[0].at(0, 0) == 1.0);
    CHECK(g.components[0].at(1, 0) == -1.0);  // wraps to phi(0,0) - phi(1,0)
    CHECK(g.components[1].at(0, 0) == 1.0);
  }

  TEST_CASE("divergence of constant edge field vanishes") {
    for (int dim : {2, 3}) {
      const GridSpec s = GridSpec::make(dim, 1.0, 6);
      EdgeField f(s, 2.25);
      const Field d = divergence(f);
      for (double v : d.values()) CHECK(v == 0.0);
    }
  }

  TEST_CASE("laplacian stencil") {
    const GridSpec s = GridSpec::make(2, 4.0, 4);  // h = 1
    Field c(s, -0.7);
    const Field lc = laplacian(c);
    for (double v : lc.values()) CHECK(v == 0.0);

    Field imp(s);
    imp.at(1, 2) = 1.0;
    const Field lap = laplacian(imp);
    for (long j = 0; j < 4; ++j)
      for (long i = 0; i < 4; ++i) {
        double expect = 0.0;
        if (i == 1 && j == 2) expect = -4.0;
        if ((i == 0 || i == 2) && j == 2) expect = 1.0;
        if (i == 1 && (j == 1 || j == 3)) expect = 1.0;
        CHECK(lap.at(i, j) == expect);
      }

    const GridSpec s3 = GridSpec::make(3, 4.0, 4);
    Field imp3(s3);
    imp3.at(0, 0, 0) = 1.0;
    const Field lap3 = laplacian(imp3);
    CHECK(lap3.at(0, 0, 0) == -6.0);
    CHECK(lap3.at(0, 0, 3) == 1.0);
    CHECK(lap3.at(3, 0, 0) == 1.0);
    CHECK(lap3.at(0, 1, 0) == 1.0);
    CHECK(lap3.at(1, 1, 0) == 0.0);
  }

  TEST_CASE("plane wave is an eigenfunction of the laplacian") {
    const int n = 32;
    const GridSpec s = GridSpec::make(2, 3.0, n);
    for (int k : {1, 3, 7, 16}) {
      Field w(s);
      for (long j = 0; j < n; ++j)
        for (long i = 0; i < n; ++i) w.at(i, j) = std::cos(2.0 * std::numbers::pi * k * (i + 0.5) * s.h / s.length);
      const double lambda = -(4.0 / (s.h * s.h)) * std::pow(std::sin(std::numbers::pi * k / n), 2);
      const Field lap = laplacian(w);
      for (std::size_t c = 0; c < w.size(); ++c) {
        CHECK(std::abs(lap[c] - lambda * w[c]) <= 1e-12 * std::abs(lambda));
      }
    }
  }

  TEST_CASE("summation by parts and gradient identity on random fields") {
    std::mt19937_64 rng(11);
    for (auto [dim, n] : {std::pair{2, 16}, std::pair{2, 64}, std::pair{3, 16}}) {
      const GridSpec s = GridSpec::make(dim, 2.0 * std::numbers::pi, n);
      for (int trial = 0; trial < 10; ++trial) {
        const Field phi = random_field(s, rng);
        const EdgeField f = random_edge_field(s, rng);
        const double lhs = inner_product(phi, divergence(f));
        const double rhs = -inner_product(gradient(phi), f);
        const double scale = norm(phi) * norm(divergence(f)) + norm(gradient(phi)) * norm(f);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);

        const double a = inner_product(phi, laplacian(phi));
        const double g2 = inner_product(gradient(phi), gradient(phi));
        CHECK(std::abs(a + g2) <= 1e-12 * g2);
        CHECK(a <= 0.0);
        // Spectral envelope.
        CHECK(-a <= (4.0 * dim / (s.h * s.h)) * inner_product(phi, phi) * (1 + 1e-14));
      }
      CHECK(inner_product(Field(s, 0.3), laplacian(Field(s, 0.3))) == 0.0);
    }
  }

  TEST_CASE("laplacian equals divergence of gradient") {
    std::mt19937_64 rng(3);
    for (int dim : {2, 3}) {
      const GridSpec s = GridSpec::make(dim, 2.0 * std::numbers::pi, 16);
      const Field phi = random_field(s, rng);
      const Field a = laplacian(phi);
      const Field b = divergence(gradient(phi));
      for (std::size_t c = 0; c < a.size(); ++c) CHECK(std::abs(a[c] - b[c]) <= 1e-13);
    }
  }

  TEST_CASE("operators commute with periodic shifts") {
    std::mt19937_64 rng(5);
    const GridSpec s = GridSpec::make(2, 1.0, 12);
    const Field phi = random_field(s, rng);
    Field shifted(s);
    for (long j = 0; j < s.n; ++j)
      for (long i = 0; i < s.n; ++i) shifted.at(i, j) = phi.at(i + 1, j - 3);
    const Field a = laplacian(phi);
    const Field b = laplacian(shifted);
    const EdgeField ga = gradient(phi);
    const EdgeField gb = gradient(shifted);
    for (long j = 0; j < s.n; ++j)
      for (long i = 0; i < s.n; ++i) {
        CHECK(b.at(i, j) == a.at(i + 1, j - 3));
        CHECK(gb.components[1].at(i, j) == ga.components[1].at(i + 1, j - 3));
      }
  }

  TEST_CASE("inner products and norms") {
    const GridSpec s = GridSpec::make(2, 4.0, 8);  // h = 0.5
    const Field one(s, 1.0);
    CHECK(inner_product(one, one) == doctest::Approx(16.0).epsilon(1e-15));
    CHECK(norm(one) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(inner_product(Field(s), one) == 0.0);
    CHECK(norm(Field(s)) == 0.0);
    CHECK(mean(Field(s, 0.25)) == doctest::Approx(0.25));

    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      const Field a = random_field(s, rng);
      const Field b = random_field(s, rng);
      CHECK(std::abs(inner_product(a, b)) <= norm(a) * norm(b) * (1 + 1e-14));
      CHECK(std::abs(norm(a) * norm(a) - inner_product(a, a)) <= 1e-14 * inner_product(a, a));
      CHECK(distance(a, b) == doctest::Approx(norm(a - b)).epsilon(1e-14));
      CHECK(inner_product(a, b) == inner_product(b, a));
    }
    const GridSpec other = GridSpec::make(2, 4.0, 4);
    CHECK_THROWS_AS(inner_product(one, Field(other, 1.0)), ContractError);
    CHECK_THROWS_AS(inner_product(EdgeField(s), EdgeField(other)), ContractError);
  }

  TEST_CASE("pointwise map and reductions") {
    std::mt19937_64 rng(23);
    const GridSpec s = GridSpec::make(2, 2.0 * std::numbers::pi, 16);
    const Field a = random_field(s, rng);
    const Field same = pointwise_map(a, [](double v) { return v; });
    for (std::size_t c = 0; c < a.size(); ++c) CHECK(same[c] == a[c]);
    CHECK(reduce_min(Field(s, 0.125)) == 0.125);
    CHECK(reduce_max(Field(s, 0.125)) == 0.125);

    Field u0(s);
    for (long j = 0; j < s.n; ++j)
      for (long i = 0; i < s.n; ++i) u0.at(i, j) = 0.5 + 0.25 * std::sin((i + 0.5) * s.h) * std::sin((j + 0.5) * s.h);
    CHECK(reduce_max(u0) <= 0.75);
    CHECK(reduce_min(u0) >= 0.25);

    Field bad = Field(s, 1.0);
    bad[5] = -1.0;
    bad[9] = -2.0;
    try {
      (void)pointwise_map(bad, [](double v) { return std::log(v); });
      FAIL("expected DomainError");
    } catch (const DomainError& e) {
      CHECK(e.index() == 5u);
    }
    CHECK(first_outside_unit_interval(Field(s, 0.5)) == s.cells());
    Field edge(s, 0.5);
    edge[7] = 1.0;
    CHECK(first_outside_unit_interval(edge) == 7u);
    CHECK_THROWS_AS(require_open_unit_interval(edge, "test"), DomainError);
  }

  TEST_CASE("reductions are independent of the thread count") {
    std::mt19937_64 rng(29);
    const GridSpec s = GridSpec::make(2, 1.0, 128);
    const Field a = random_field(s, rng);
    const Field b = random_field(s, rng);
    const double ref = inner_product(a, b);
    const int saved = omp_get_max_threads();
    for (int threads : {1, 2, 3, 4}) {
      omp_set_num_threads(threads);
      CHECK(inner_product(a, b) == ref);
      CHECK(norm(laplacian(a)) == norm(laplacian(a)));
    }
    omp_set_num_threads(saved);
  }
}
