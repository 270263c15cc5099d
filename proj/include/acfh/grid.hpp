#pragma once

// Cell-centered periodic grid functions and the discrete difference operators
// acting on them.
//
// Storage is row-major with x fastest: cell (i, j, k), 0 <= i, j, k < N, lives at
// i + N * (j + N * k). The mathematical index 1..N maps to storage 0..N-1. Edge
// component (i+1/2, j) of an EdgeField is stored at the storage index of (i, j).

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "acfh/error.hpp"
#include "acfh/summation.hpp"

namespace acfh {

struct GridSpec {
  int dim = 2;
  double length = 1.0;
  int n = 2;
  double h = 0.5;

  /// Validating constructor; h is derived as length / n.
  static GridSpec make(int dim, double length, int n);

  std::size_t cells() const noexcept;
  /// h^dim, the weight of one cell in the discrete inner product.
  double cell_volume() const noexcept;
  /// L^dim.
  double measure() const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

std::string describe(const GridSpec& spec);

class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& spec, double value = 0.0);
  Field(const GridSpec& spec, std::vector<double> values);

  const GridSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  double& operator[](std::size_t idx) noexcept { return values_[idx]; }
  double operator[](std::size_t idx) const noexcept { return values_[idx]; }

  /// Storage index of cell (i, j, k) with periodic wrap on every axis.
  std::size_t index(long i, long j, long k = 0) const noexcept;
  double& at(long i, long j, long k = 0) noexcept { return values_[index(i, j, k)]; }
  double at(long i, long j, long k = 0) const noexcept { return values_[index(i, j, k)]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);

/// y += a * x
void axpy(double a, const Field& x, Field& y);

struct EdgeField {
  GridSpec spec;
  std::vector<Field> components;  // one per axis

  explicit EdgeField(const GridSpec& spec, double value = 0.0);
};

// Operators. Outputs are freshly allocated; inputs are never modified.

EdgeField gradient(const Field& phi);
Field divergence(const EdgeField& f);
Field laplacian(const Field& phi);

double inner_product(const Field& a, const Field& b);
double inner_product(const EdgeField& a, const EdgeField& b);
double norm(const Field& a);
double norm(const EdgeField& a);
/// ||a - b||_h without materializing the difference.
double distance(const Field& a, const Field& b);
/// <a, 1>_h / measure
double mean(const Field& a);

double reduce_min(const Field& a);
double reduce_max(const Field& a);

/// Elementwise application of f. A non-finite result raises DomainError
/// carrying the lowest offending storage index.
template <class F>
Field pointwise_map(const Field& phi, const F& f) {
  Field out(phi.spec());
  const auto n = static_cast<std::ptrdiff_t>(phi.size());
  std::ptrdiff_t bad = n;
  const double* in = phi.data();
  double* o = out.data();
#pragma omp parallel for schedule(static) reduction(min : bad)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double v = f(in[i]);
    o[i] = v;
    if (!std::isfinite(v) && i < bad) bad = i;
  }
  if (bad < n) {
    throw DomainError("pointwise_map produced a non-finite value", static_cast<std::size_t>(bad));
  }
  return out;
}

/// Throws DomainError with the first index where a value is not strictly
/// inside (0, 1).
void require_open_unit_interval(const Field& u, const char* what);

/// Lowest storage index whose value is not strictly inside (0, 1), or size().
std::size_t first_outside_unit_interval(const Field& u);

void require_same_spec(const GridSpec& a, const GridSpec& b, const char* what);

}  // namespace acfh
