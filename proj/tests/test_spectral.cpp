#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "acfh/spectral.hpp"
#include "support.hpp"

using namespace acfh;
using acfh::test::random_field;

TEST_SUITE("spectral") {
  TEST_CASE("build validation") {
    const GridSpec s = GridSpec::make(2, 1.0, 8);
    CHECK_THROWS_AS(HelmholtzOperator::build(s, 0.0, 1.0), ContractError);
    CHECK_THROWS_AS(HelmholtzOperator::build(s, -1.0, 1.0), ContractError);
    CHECK_THROWS_AS(HelmholtzOperator::build(s, 1.0, -1.0), ContractError);
  }

  TEST_CASE("symbol examples") {
    const GridSpec s = GridSpec::make(2, 2.0 * std::numbers::pi, 16);
    const auto flat = HelmholtzOperator::build(s, 3.5, 0.0);
    for (long ky = 0; ky < 16; ++ky)
      for (long kx = 0; kx < 16; ++kx) CHECK(flat.symbol(kx, ky) == 3.5);

    const auto op = HelmholtzOperator::build(s, 2.0, 0.01);
    CHECK(op.symbol(0, 0) == 2.0);
    CHECK(op.max_symbol() == doctest::Approx(2.0 + 8 * 0.01 / (s.h * s.h)).epsilon(1e-15));
    CHECK(op.symbol(8, 8) == doctest::Approx(op.max_symbol()).epsilon(1e-15));
    for (double v : op.laplacian_symbol()) CHECK(v >= 0.0);
    CHECK(op.symbol(3, -2) == op.symbol(3, 14));
    CHECK(op.diagonal() == doctest::Approx(2.0 + 0.04 / (s.h * s.h)));

    const GridSpec s3 = GridSpec::make(3, 1.0, 8);
    const auto op3 = HelmholtzOperator::build(s3, 1.0, 0.5);
    CHECK(op3.max_symbol() == doctest::Approx(1.0 + 12 * 0.5 / (s3.h * s3.h)).epsilon(1e-15));
    CHECK(op3.symbol(4, 4, 4) == doctest::Approx(op3.max_symbol()).epsilon(1e-15));

    const auto shifted = op.with_shift(5.0);
    CHECK(shifted.symbol(0, 0) == 5.0);
    CHECK(shifted.symbol(8, 8) - 5.0 == doctest::Approx(op.symbol(8, 8) - 2.0).epsilon(1e-15));
  }

  TEST_CASE("symbol agrees with a direct DFT of the stencil") {
    std::mt19937_64 rng(51);
    for (auto [dim, n] : {std::pair{2, 4}, std::pair{2, 8}, std::pair{3, 4}, std::pair{2, 6}}) {
      const GridSpec s = GridSpec::make(dim, 1.3, n);
      const auto op = HelmholtzOperator::build(s, 1.7, 0.02);
      const Field u = random_field(s, rng);
      const auto U = test::naive_dft(u);
      const auto AU = test::naive_dft(op.apply(u));
      const long nk = dim == 3 ? n : 1;
      for (long kz = 0; kz < nk; ++kz)
        for (long ky = 0; ky < n; ++ky)
          for (long kx = 0; kx < n; ++kx) {
            const std::size_t c = u.index(kx, ky, kz);
            if (std::abs(U[c]) < 1e-6L) continue;
            const std::complex<long double> ratio = AU[c] / U[c];
            const double sym = op.symbol(kx, ky, kz);
            CHECK(std::abs(static_cast<double>(ratio.real()) - sym) <= 1e-10 * sym);
            CHECK(std::abs(static_cast<double>(ratio.imag())) <= 1e-10 * sym);
          }
    }
  }

  TEST_CASE("solve examples") {
    std::mt19937_64 rng(53);
    for (auto [dim, n] : {std::pair{2, 32}, std::pair{2, 24}, std::pair{3, 16}}) {
      const GridSpec s = GridSpec::make(dim, 2.0 * std::numbers::pi, n);
      const auto op = HelmholtzOperator::build(s, 1e4 + 37.0, 0.01);

      const Field c = op.solve(Field(s, 2.0));
      for (double v : c.values()) CHECK(v == doctest::Approx(2.0 / op.shift()).epsilon(1e-14));

      const Field u = random_field(s, rng);
      const Field b = op.apply(u);
      const Field back = op.solve(b);
      for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(back[i] - u[i]) <= 1e-11);

      const Field rhs = random_field(s, rng);
      const Field x = op.solve(rhs);
      CHECK(norm(op.apply(x) - rhs) <= 1e-12 * norm(rhs));
      CHECK(mean(x) == doctest::Approx(mean(rhs) / op.shift()).epsilon(1e-13));

      CgStats st;
      const Field y = solve_cg(op, rhs, 1e-12, 1000, &st);
      CHECK(distance(x, y) <= 1e-10 * std::max(1.0, norm(x)));
      CHECK(st.relative_residual <= 1e-12);
      CHECK(st.iterations <= static_cast<int>(s.cells()));
    }
  }

  TEST_CASE("stiff operator: spectral and CG agree") {
    std::mt19937_64 rng(57);
    const GridSpec s = GridSpec::make(2, 2.0 * std::numbers::pi, 64);
    const auto op = HelmholtzOperator::build(s, 1.0, 1.0);
    const Field rhs = random_field(s, rng);
    const Field x = op.solve(rhs);
    const Field y = solve_cg(op, rhs, 1e-12, 5000);
    CHECK(distance(x, y) <= 1e-10 * norm(x));
    CHECK_THROWS_AS(solve_cg(op, rhs, 1e-12, 2), ConvergenceError);
  }

  TEST_CASE("CG with zero right-hand side") {
    const GridSpec s = GridSpec::make(2, 1.0, 8);
    const auto op = HelmholtzOperator::build(s, 1.0, 0.1);
    CgStats st;
    const Field z = solve_cg(op, Field(s), 1e-12, 10, &st);
    CHECK(st.iterations <= 1);
    for (double v : z.values()) CHECK(v == 0.0);
  }

  TEST_CASE("self-adjoint and positive definite") {
    std::mt19937_64 rng(59);
    for (int dim : {2, 3}) {
      const GridSpec s = GridSpec::make(dim, 1.0, 12);
      const auto op = HelmholtzOperator::build(s, 0.75, 0.03);
      for (int t = 0; t < 10; ++t) {
        const Field u = random_field(s, rng);
        const Field v = random_field(s, rng);
        const double a = inner_product(op.apply(u), v);
        const double b = inner_product(u, op.apply(v));
        CHECK(std::abs(a - b) <= 1e-12 * norm(op.apply(u)) * norm(v));
        CHECK(inner_product(op.apply(u), u) >= op.shift() * inner_product(u, u) * (1 - 1e-14));
      }
    }
  }

  TEST_CASE("spec mismatch") {
    const auto op = HelmholtzOperator::build(GridSpec::make(2, 1.0, 8), 1.0, 0.1);
    CHECK_THROWS_AS(op.solve(Field(GridSpec::make(2, 1.0, 16))), ContractError);
  }

  TEST_CASE("concurrent solves on a shared operator") {
    std::mt19937_64 rng(61);
    const GridSpec s = GridSpec::make(2, 1.0, 32);
    const auto op = HelmholtzOperator::build(s, 3.0, 0.05);
    std::vector<Field> rhs;
    for (int i = 0; i < 8; ++i) rhs.push_back(random_field(s, rng));
    std::vector<Field> serial;
    for (const Field& b : rhs) serial.push_back(op.solve(b));
    std::vector<Field> par(rhs.size(), Field(s));
#pragma omp parallel for
    for (int i = 0; i < 8; ++i) par[static_cast<std::size_t>(i)] = op.solve(rhs[static_cast<std::size_t>(i)]);
    for (std::size_t i = 0; i < rhs.size(); ++i)
      for (std::size_t c = 0; c < s.cells(); ++c) CHECK(par[i][c] == serial[i][c]);
  }
}
