#include "acfh/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

namespace acfh {

namespace {

// FFTW's planner is not reentrant; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwDeleter {
  void operator()(T* p) const noexcept { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <class T>
FftwBuffer<T> fftw_alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

}  // namespace

namespace detail {

struct SpectralPlan {
  GridSpec spec;
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
  std::vector<double> lap_symbol;  // eigenvalues of -lap_h, half spectrum
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit SpectralPlan(const GridSpec& s) : spec(s) {
    const int n = s.n;
    const std::size_t half = static_cast<std::size_t>(n / 2 + 1);
    real_size = s.cells();
    complex_size = real_size / static_cast<std::size_t>(n) * half;

    // sin^2 table, identical for every axis
    std::vector<double> s2(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double v = std::sin(std::numbers::pi * k / n);
      s2[static_cast<std::size_t>(k)] = v * v;
    }
    const double scale = 4.0 / (s.h * s.h);
    lap_symbol.resize(complex_size);
    const std::size_t nn = static_cast<std::size_t>(n);
    const std::size_t nz = s.dim == 3 ? nn : 1;
    for (std::size_t kz = 0; kz < nz; ++kz)
      for (std::size_t ky = 0; ky < nn; ++ky)
        for (std::size_t kx = 0; kx < half; ++kx) {
          const double sz = s.dim == 3 ? s2[kz] : 0.0;
          lap_symbol[kx + half * (ky + nn * kz)] = scale * (s2[kx] + s2[ky] + sz);
        }

    auto in = fftw_alloc<double>(real_size);
    auto out = fftw_alloc<fftw_complex>(complex_size);
    int dims[3] = {n, n, n};
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c(s.dim, dims, in.get(), out.get(), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r(s.dim, dims, out.get(), in.get(), FFTW_ESTIMATE);
    if (!forward || !backward) throw std::runtime_error("FFTW planning failed for " + describe(s));
  }

  ~SpectralPlan() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }

  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;
};

}  // namespace detail

HelmholtzOperator::HelmholtzOperator(std::shared_ptr<const detail::SpectralPlan> plan, double shift, double diffusion)
    : plan_(std::move(plan)), shift_(shift), diffusion_(diffusion) {}

HelmholtzOperator HelmholtzOperator::build(const GridSpec& spec, double shift, double diffusion) {
  if (!(shift > 0.0) || !std::isfinite(shift)) throw ContractError("Helmholtz operator needs shift > 0");
  if (!(diffusion >= 0.0) || !std::isfinite(diffusion)) throw ContractError("Helmholtz operator needs diffusion >= 0");
  return HelmholtzOperator(std::make_shared<const detail::SpectralPlan>(spec), shift, diffusion);
}

HelmholtzOperator HelmholtzOperator::with_shift(double shift) const {
  if (!(shift > 0.0) || !std::isfinite(shift)) throw ContractError("Helmholtz operator needs shift > 0");
  return HelmholtzOperator(plan_, shift, diffusion_);
}

const GridSpec& HelmholtzOperator::spec() const noexcept { return plan_->spec; }

std::span<const double> HelmholtzOperator::laplacian_symbol() const noexcept { return plan_->lap_symbol; }

double HelmholtzOperator::symbol(long kx, long ky, long kz) const {
  const GridSpec& s = plan_->spec;
  const double scale = 4.0 / (s.h * s.h);
  auto s2 = [&](long k) {
    const double v = std::sin(std::numbers::pi * static_cast<double>(k) / s.n);
    return v * v;
  };
  double lam = s2(kx) + s2(ky);
  if (s.dim == 3) lam += s2(kz);
  return shift_ + diffusion_ * scale * lam;
}

double HelmholtzOperator::max_symbol() const noexcept {
  const auto& sym = plan_->lap_symbol;
  return shift_ + diffusion_ * *std::max_element(sym.begin(), sym.end());
}

double HelmholtzOperator::diagonal() const noexcept {
  const GridSpec& s = plan_->spec;
  return shift_ + diffusion_ * 2.0 * s.dim / (s.h * s.h);
}

Field HelmholtzOperator::apply(const Field& u) const {
  require_same_spec(u.spec(), plan_->spec, "HelmholtzOperator::apply");
  Field out = laplacian(u);
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  const double* x = u.data();
  double* o = out.data();
  const double a = shift_;
  const double d = diffusion_;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) o[i] = a * x[i] - d * o[i];
  return out;
}

Field HelmholtzOperator::solve(const Field& b) const {
  require_same_spec(b.spec(), plan_->spec, "HelmholtzOperator::solve");
  const detail::SpectralPlan& p = *plan_;
  auto real = fftw_alloc<double>(p.real_size);
  auto spec = fftw_alloc<fftw_complex>(p.complex_size);
  std::copy(b.data(), b.data() + p.real_size, real.get());
  fftw_execute_dft_r2c(p.forward, real.get(), spec.get());

  const double norm = 1.0 / static_cast<double>(p.real_size);
  const auto nc = static_cast<std::ptrdiff_t>(p.complex_size);
  const double* lam = p.lap_symbol.data();
  fftw_complex* c = spec.get();
  const double a = shift_;
  const double d = diffusion_;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < nc; ++i) {
    const double f = norm / (a + d * lam[i]);
    c[i][0] *= f;
    c[i][1] *= f;
  }
  fftw_execute_dft_c2r(p.backward, spec.get(), real.get());
  return Field(p.spec, std::vector<double>(real.get(), real.get() + p.real_size));
}

Field solve_cg(const HelmholtzOperator& op, const Field& b, double tol, int max_iter, CgStats* stats) {
  if (!(tol > 0.0)) throw ContractError("solve_cg needs tol > 0");
  require_same_spec(b.spec(), op.spec(), "solve_cg");
  Field u(b.spec());
  const double bnorm = norm(b);
  CgStats local;
  if (bnorm == 0.0) {
    if (stats) *stats = local;
    return u;
  }
  const double inv_diag = 1.0 / op.diagonal();
  Field r = b;
  Field z = inv_diag * r;
  Field p = z;
  double rz = inner_product(r, z);
  double rnorm = bnorm;
  while (rnorm > tol * bnorm) {
    if (local.iterations >= max_iter) {
      throw ConvergenceError("solve_cg: no convergence after " + std::to_string(max_iter) +
                             " iterations, relative residual " + std::to_string(rnorm / bnorm));
    }
    const Field ap = op.apply(p);
    const double alpha = rz / inner_product(p, ap);
    axpy(alpha, p, u);
    axpy(-alpha, ap, r);
    z = inv_diag * r;
    const double rz_next = inner_product(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    p *= beta;
    p += z;
    rnorm = norm(r);
    ++local.iterations;
  }
  local.relative_residual = rnorm / bnorm;
  if (stats) *stats = local;
  return u;
}

}  // namespace acfh
