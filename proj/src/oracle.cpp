#include "acfh/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace acfh::oracle {

namespace {

// -lap_h applied through the periodic accessor.
double neg_lap_at(const Field& u, long i, long j, long k) {
  const GridSpec& s = u.spec();
  double v = 2.0 * s.dim * u.at(i, j, k) - u.at(i + 1, j, k) - u.at(i - 1, j, k) - u.at(i, j + 1, k) -
             u.at(i, j - 1, k);
  if (s.dim == 3) v -= u.at(i, j, k + 1) + u.at(i, j, k - 1);
  return v / (s.h * s.h);
}

template <class Body>
void each_cell(const GridSpec& s, const Body& body) {
  const long n = s.n;
  const long nk = s.dim == 3 ? n : 1;
  for (long k = 0; k < nk; ++k)
    for (long j = 0; j < n; ++j)
      for (long i = 0; i < n; ++i) body(i, j, k);
}

// (1/tau - eps^2 lap_h + diag(g)) v
Field apply_hessian(const Field& v, const std::vector<double>& g, const ModelParams& params) {
  Field out(v.spec());
  const double inv_tau = 1.0 / params.tau;
  const double eps2 = params.epsilon * params.epsilon;
  each_cell(v.spec(), [&](long i, long j, long k) {
    const std::size_t c = v.index(i, j, k);
    out[c] = (inv_tau + g[c]) * v[c] + eps2 * neg_lap_at(v, i, j, k);
  });
  return out;
}

double dot(const Field& a, const Field& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s) * a.spec().cell_volume();
}

// Jacobi-preconditioned CG on the Newton system.
Field newton_direction(const Field& rhs, const std::vector<double>& g, const ModelParams& params, double rel_tol,
                       int max_iter) {
  const GridSpec& s = rhs.spec();
  const double inv_tau = 1.0 / params.tau;
  const double lap_diag = params.epsilon * params.epsilon * 2.0 * s.dim / (s.h * s.h);
  std::vector<double> inv_diag(rhs.size());
  for (std::size_t c = 0; c < rhs.size(); ++c) inv_diag[c] = 1.0 / (inv_tau + g[c] + lap_diag);

  Field x(s);
  Field r = rhs;
  Field z(s);
  for (std::size_t c = 0; c < r.size(); ++c) z[c] = inv_diag[c] * r[c];
  Field p = z;
  double rz = dot(r, z);
  const double bnorm = std::sqrt(dot(rhs, rhs));
  if (bnorm == 0.0) return x;
  for (int it = 0; it < max_iter; ++it) {
    if (std::sqrt(dot(r, r)) <= rel_tol * bnorm) return x;
    const Field ap = apply_hessian(p, g, params);
    const double a = rz / dot(p, ap);
    for (std::size_t c = 0; c < x.size(); ++c) {
      x[c] += a * p[c];
      r[c] -= a * ap[c];
      z[c] = inv_diag[c] * r[c];
    }
    const double rz_next = dot(r, z);
    const double b = rz_next / rz;
    rz = rz_next;
    for (std::size_t c = 0; c < p.size(); ++c) p[c] = z[c] + b * p[c];
  }
  if (std::sqrt(dot(r, r)) <= rel_tol * bnorm) return x;
  throw ConvergenceError("oracle CG did not converge");
}

bool strictly_inside(const Field& u) {
  return std::all_of(u.values().begin(), u.values().end(), [](double v) { return v > 0.0 && v < 1.0; });
}

}  // namespace

Field scheme_residual(const Field& u, const Field& u_prev, const ModelParams& params) {
  require_same_spec(u.spec(), u_prev.spec(), "oracle::scheme_residual");
  Field out(u.spec());
  const double eps2 = params.epsilon * params.epsilon;
  each_cell(u.spec(), [&](long i, long j, long k) {
    const std::size_t c = u.index(i, j, k);
    const double v = u[c];
    out[c] = (v - u_prev[c]) / params.tau + eps2 * neg_lap_at(u, i, j, k) + std::log(v) - std::log(1.0 - v) +
             params.theta * (1.0 - 2.0 * u_prev[c]);
  });
  return out;
}

NewtonReport solve_reference_detailed(const Field& u_prev, const ModelParams& params, const NewtonConfig& cfg,
                                      const Field* start) {
  params.validate();
  if (!(cfg.tol > 0.0)) throw ContractError("solve_reference: tol must be positive");
  if (cfg.max_iter < 1 || !(cfg.shrink > 0.0 && cfg.shrink < 1.0) || !(cfg.min_step > 0.0))
    throw ContractError("solve_reference: invalid Newton settings");
  require_same_spec(u_prev.spec(), params.grid, "solve_reference");
  if (!strictly_inside(u_prev)) throw DomainError("solve_reference: previous state outside (0,1)");
  NewtonReport rep;
  rep.u = start ? *start : u_prev;
  if (!strictly_inside(rep.u)) throw DomainError("solve_reference: start outside (0,1)");

  Field res = oracle::scheme_residual(rep.u, u_prev, params);
  double rn = std::sqrt(dot(res, res));
  rep.residual_history.push_back(rn);
  std::vector<double> g(rep.u.size());

  while (rn > cfg.tol) {
    if (rep.iterations >= cfg.max_iter) {
      std::ostringstream os;
      os << "reference Newton stalled at residual " << rn << " after " << rep.iterations << " iterations";
      throw NewtonNonconvergence(os.str(), rep.residual_history);
    }
    for (std::size_t c = 0; c < g.size(); ++c) g[c] = 1.0 / (rep.u[c] * (1.0 - rep.u[c]));
    Field rhs = res;
    rhs *= -1.0;
    const double cg_tol = std::clamp(1e-3 * rn, 1e-14, 1e-3);
    const Field delta = newton_direction(rhs, g, params, cg_tol, cfg.cg_max_iter);

    double t = 1.0;
    bool accepted = false;
    Field trial(u_prev.spec());
    Field trial_res(u_prev.spec());
    double trial_rn = rn;
    while (t >= cfg.min_step) {
      for (std::size_t c = 0; c < trial.size(); ++c) trial[c] = rep.u[c] + t * delta[c];
      if (strictly_inside(trial)) {
        trial_res = oracle::scheme_residual(trial, u_prev, params);
        trial_rn = std::sqrt(dot(trial_res, trial_res));
        if (trial_rn < rn) {
          accepted = true;
          break;
        }
      }
      t *= cfg.shrink;
    }
    if (!accepted) {
      const double step = std::sqrt(dot(delta, delta));
      const double size = std::sqrt(dot(rep.u, rep.u));
      if (step <= 1e-13 * size) {
        rep.roundoff_limited = true;
        return rep;
      }
      std::ostringstream os;
      os << "reference Newton line search failed at residual " << rn;
      throw NewtonNonconvergence(os.str(), rep.residual_history);
    }
    rep.u = std::move(trial);
    res = std::move(trial_res);
    rn = trial_rn;
    rep.residual_history.push_back(rn);
    ++rep.iterations;
  }
  return rep;
}

Field solve_reference(const Field& u_prev, const ModelParams& params, const NewtonConfig& cfg) {
  return solve_reference_detailed(u_prev, params, cfg).u;
}

Field stationary_multiplier(const Field& u_star, const Field& u_prev, const ModelParams& params) {
  require_same_spec(u_star.spec(), u_prev.spec(), "stationary_multiplier");
  Field out(u_star.spec());
  const double eps2 = params.epsilon * params.epsilon;
  each_cell(u_star.spec(), [&](long i, long j, long k) {
    const std::size_t c = u_star.index(i, j, k);
    out[c] = -(u_star[c] - u_prev[c]) / params.tau - eps2 * neg_lap_at(u_star, i, j, k);
  });
  return out;
}

Field stationary_multiplier_from_potential(const Field& u_star, const Field& u_prev, const ModelParams& params) {
  require_same_spec(u_star.spec(), u_prev.spec(), "stationary_multiplier_from_potential");
  if (!strictly_inside(u_star)) throw DomainError("stationary multiplier needs u* inside (0,1)");
  Field out(u_star.spec());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = std::log(u_star[c]) - std::log(1.0 - u_star[c]) + params.theta * (1.0 - 2.0 * u_prev[c]);
  }
  return out;
}

KktResiduals kkt_residuals(const Field& u1, const Field& u2, const Field& u3, const Field& u_prev,
                           const ModelParams& params) {
  KktResiduals out;
  Field a(u1.spec());
  Field b(u1.spec());
  Field c(u1.spec());
  const double eps2 = params.epsilon * params.epsilon;
  each_cell(u1.spec(), [&](long i, long j, long k) {
    const std::size_t q = u1.index(i, j, k);
    a[q] = (u1[q] - u_prev[q]) / params.tau + eps2 * neg_lap_at(u1, i, j, k) + u3[q];
    b[q] = std::log(u2[q]) - std::log(1.0 - u2[q]) + params.theta * (1.0 - 2.0 * u_prev[q]) - u3[q];
    c[q] = u1[q] - u2[q];
  });
  out.quadratic = std::sqrt(dot(a, a));
  out.logarithmic = std::sqrt(dot(b, b));
  out.constraint = std::sqrt(dot(c, c));
  return out;
}

}  // namespace acfh::oracle
