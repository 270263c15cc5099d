#include "acfh/model.hpp"

#include <string>

namespace acfh {

void ModelParams::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ContractError("epsilon must be nonnegative");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ContractError("tau must be positive");
  if (!(theta > 2.0) || !std::isfinite(theta)) throw ContractError("theta must exceed 2");
  GridSpec::make(grid.dim, grid.length, grid.n);
}

namespace {

void require_unit(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError(std::string(what) + ": argument " + std::to_string(x) + " outside (0,1)");
}

}  // namespace

double potential_F(double x, double theta) {
  require_unit(x, "potential_F");
  return x * std::log(x) + (1.0 - x) * std::log1p(-x) + theta * (x - x * x);
}

double potential_f(double x, double theta) {
  require_unit(x, "potential_f");
  return std::log(x) - std::log1p(-x) + theta * (1.0 - 2.0 * x);
}

double discrete_energy(const Field& u, const ModelParams& params) {
  require_same_spec(u.spec(), params.grid, "discrete_energy");
  require_open_unit_interval(u, "discrete_energy");
  const double* x = u.data();
  const double theta = params.theta;
  const double bulk = pairwise_reduce(u.size(), [x, theta](std::size_t i) {
    const double v = x[i];
    return v * std::log(v) + (1.0 - v) * std::log1p(-v) + theta * (v - v * v);
  });
  const EdgeField g = gradient(u);
  return params.grid.cell_volume() * bulk + 0.5 * params.epsilon * params.epsilon * inner_product(g, g);
}

double objective_j1(const Field& u, const Field& u_prev, const ModelParams& params) {
  const double d = distance(u, u_prev);
  const EdgeField g = gradient(u);
  return d * d / (2.0 * params.tau) + 0.5 * params.epsilon * params.epsilon * inner_product(g, g);
}

double objective_j2(const Field& u, const Field& u_prev, const ModelParams& params) {
  require_same_spec(u.spec(), u_prev.spec(), "objective_j2");
  require_open_unit_interval(u, "objective_j2");
  const double* x = u.data();
  const double* p = u_prev.data();
  const double theta = params.theta;
  const double s = pairwise_reduce(u.size(), [x, p, theta](std::size_t i) {
    const double v = x[i];
    return v * std::log(v) + (1.0 - v) * std::log1p(-v) + theta * v * (1.0 - 2.0 * p[i]);
  });
  return u.spec().cell_volume() * s;
}

ObjectiveValue objective(const Field& u, const Field& u_prev, const ModelParams& params) {
  return ObjectiveValue{objective_j1(u, u_prev, params), objective_j2(u, u_prev, params)};
}

Field scheme_residual_field(const Field& u, const Field& u_prev, const ModelParams& params) {
  require_same_spec(u.spec(), u_prev.spec(), "scheme_residual_field");
  require_open_unit_interval(u, "scheme_residual_field");
  Field out = laplacian(u);
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  const double* x = u.data();
  const double* p = u_prev.data();
  double* o = out.data();
  const double inv_tau = 1.0 / params.tau;
  const double eps2 = params.epsilon * params.epsilon;
  const double theta = params.theta;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    o[i] = (x[i] - p[i]) * inv_tau - eps2 * o[i] + std::log(x[i]) - std::log1p(-x[i]) + theta * (1.0 - 2.0 * p[i]);
  }
  return out;
}

double scheme_residual(const Field& u, const Field& u_prev, const ModelParams& params) {
  return norm(scheme_residual_field(u, u_prev, params));
}

double SchemeConstants::delta(double rho) const {
  if (!(rho > 0.0)) throw ContractError("delta(rho) needs rho > 0");
  return 2.0 / (rho / mu1 + L1 / rho);
}

SchemeConstants scheme_constants(const ModelParams& params) {
  params.validate();
  const double h = params.grid.h;
  const double lambda_max = 4.0 * params.grid.dim / (h * h);
  SchemeConstants c;
  c.mu1 = 1.0 / params.tau;
  c.L1 = c.mu1 + params.epsilon * params.epsilon * lambda_max;
  c.rho_opt = std::sqrt(c.mu1 * c.L1);
  c.delta_max = std::sqrt(c.mu1 / c.L1);
  return c;
}

}  // namespace acfh
