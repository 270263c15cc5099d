#pragma once

// Periodic solves of (shift - diffusion * lap_h) u = b.
//
// The operator is circulant, so the DFT diagonalizes it with eigenvalues
//   shift + diffusion * (4/h^2) * sum_axes sin^2(pi k_axis / N).
// Transforms are delegated to FFTW (real-to-complex, half spectrum along x).
// A Jacobi-preconditioned conjugate gradient on the same operator is kept as an
// independent cross-check.

#include <memory>
#include <span>

#include "acfh/grid.hpp"

namespace acfh {

namespace detail {
struct SpectralPlan;
}

class HelmholtzOperator {
 public:
  /// Requires shift > 0 and diffusion >= 0.
  static HelmholtzOperator build(const GridSpec& spec, double shift, double diffusion);

  /// Same grid and diffusion with a new shift. Transform plans and the
  /// Laplacian symbol are shared, so this costs O(1).
  HelmholtzOperator with_shift(double shift) const;

  const GridSpec& spec() const noexcept;
  double shift() const noexcept { return shift_; }
  double diffusion() const noexcept { return diffusion_; }

  /// Eigenvalue of the operator for an integer frequency tuple (any integers;
  /// taken modulo N). kz is ignored in 2D.
  double symbol(long kx, long ky, long kz = 0) const;
  /// Eigenvalues of -lap_h in half-spectrum storage order ([kz][ky][kx], kx <= N/2).
  std::span<const double> laplacian_symbol() const noexcept;
  double max_symbol() const noexcept;
  double min_symbol() const noexcept { return shift_; }
  /// Constant diagonal of the stencil matrix, shift + diffusion * 2 dim / h^2.
  double diagonal() const noexcept;

  /// Real-space stencil application.
  Field apply(const Field& u) const;
  /// Direct spectral solve.
  Field solve(const Field& b) const;

 private:
  HelmholtzOperator(std::shared_ptr<const detail::SpectralPlan> plan, double shift, double diffusion);

  std::shared_ptr<const detail::SpectralPlan> plan_;
  double shift_;
  double diffusion_;
};

struct CgStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned CG for op u = b, stopping at ||op u - b|| <= tol ||b||.
/// Throws ConvergenceError when max_iter iterations do not suffice.
Field solve_cg(const HelmholtzOperator& op, const Field& b, double tol, int max_iter, CgStats* stats = nullptr);

}  // namespace acfh
