#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "acfh/grid.hpp"

namespace acfh::test {

inline Field random_field(const GridSpec& spec, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f(spec);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
  return f;
}

inline EdgeField random_edge_field(const GridSpec& spec, std::mt19937_64& rng) {
  EdgeField e(spec);
  for (auto& c : e.components) c = random_field(spec, rng);
  return e;
}

inline double rel_diff(double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

inline long double h_long(long double x, long double rho, long double m) {
  return std::log(x) - std::log1p(-x) + rho * x - m;
}

/// Root of log x - log(1-x) + rho x - m on (0,1) by plain bisection in long double.
inline double bisection_root(double rho, double m) {
  long double lo = 0.0L;
  long double hi = 1.0L;
  for (int it = 0; it < 200; ++it) {
    const long double mid = 0.5L * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h_long(mid, rho, m) < 0.0L) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>(0.5L * (lo + hi));
}

/// Full complex DFT of a real field by direct summation (N^dim squared work).
inline std::vector<std::complex<long double>> naive_dft(const Field& f) {
  const GridSpec& s = f.spec();
  const long n = s.n;
  const long nk = s.dim == 3 ? n : 1;
  const long double two_pi = 2.0L * 3.14159265358979323846264338327950288L;
  std::vector<std::complex<long double>> out(f.size());
  for (long kz = 0; kz < nk; ++kz)
    for (long ky = 0; ky < n; ++ky)
      for (long kx = 0; kx < n; ++kx) {
        std::complex<long double> acc = 0.0L;
        for (long z = 0; z < nk; ++z)
          for (long y = 0; y < n; ++y)
            for (long x = 0; x < n; ++x) {
              const long double phase = -two_pi * static_cast<long double>(kx * x + ky * y + kz * z) / n;
              acc += static_cast<long double>(f.at(x, y, z)) *
                     std::complex<long double>(std::cos(phase), std::sin(phase));
            }
        out[f.index(kx, ky, kz)] = acc;
      }
  return out;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("acfh_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace acfh::test
