#include "divcert/ode.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace divcert {

namespace {

using Rhs = std::function<std::pair<Vector, Vector>(double, const Vector&, const Vector&)>;

std::size_t step_count(double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive and finite");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be finite and at least dt");
  return static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
}

double max_abs(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void integrate(ODETrajectory& traj, const Rhs& rhs, Vector u, Vector v, std::size_t n) {
  const double h = traj.dt;
  traj.t.reserve(n);
  traj.u.reserve(n);
  traj.v.reserve(n);
  traj.t.push_back(h);
  traj.u.push_back(u);
  traj.v.push_back(v);
  for (std::size_t j = 1; j < n; ++j) {
    const double t = h * static_cast<double>(j);
    auto [ku1, kv1] = rhs(t, u, v);
    auto [ku2, kv2] = rhs(t + 0.5 * h, u + ku1 * (0.5 * h), v + kv1 * (0.5 * h));
    auto [ku3, kv3] = rhs(t + 0.5 * h, u + ku2 * (0.5 * h), v + kv2 * (0.5 * h));
    auto [ku4, kv4] = rhs(t + h, u + ku3 * h, v + kv3 * h);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += h / 6.0 * (ku1[i] + 2.0 * ku2[i] + 2.0 * ku3[i] + ku4[i]);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += h / 6.0 * (kv1[i] + 2.0 * kv2[i] + 2.0 * kv3[i] + kv4[i]);
    if (!u.all_finite() || !v.all_finite()) {
      throw NonFiniteState("non-finite ODE state at t = " + std::to_string(h * static_cast<double>(j + 1)));
    }
    traj.t.push_back(h * static_cast<double>(j + 1));
    traj.u.push_back(u);
    traj.v.push_back(v);
  }
}

// cumulative integral of h over the stored grid, with init the integral over [0, t0];
// interior intervals use the 4-point cubic rule, the end intervals the 3-point one
std::vector<Vector> cumulative_integral(const std::vector<Vector>& h, double dt, Vector init) {
  const std::size_t n = h.size();
  std::vector<Vector> out;
  out.reserve(n);
  out.push_back(init);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    Vector piece;
    if (n < 3) {
      piece = (h[j] + h[j + 1]) * (dt / 2.0);
    } else if (j == 0) {
      piece = (h[0] * 5.0 + h[1] * 8.0 - h[2]) * (dt / 12.0);
    } else if (j + 2 == n) {
      piece = (h[j + 1] * 5.0 + h[j] * 8.0 - h[j - 1]) * (dt / 12.0);
    } else {
      piece = ((h[j] + h[j + 1]) * 13.0 - h[j - 1] - h[j + 2]) * (dt / 24.0);
    }
    out.push_back(out.back() + piece);
  }
  return out;
}

void require_primal(const ODETrajectory& traj, const char* what) {
  if (traj.mirror) throw InvalidArgument(std::string(what) + " needs a primal (x, z) trajectory");
}

}  // namespace

Vector ODETrajectory::p(std::size_t i) const {
  require_primal(*this, "p(t)");
  return (u[i] - v[i]) * (r * (r + 2.0) / (t[i] * t[i]));
}

Vector ODETrajectory::q(std::size_t i) const {
  require_primal(*this, "q(t)");
  return (u[i] - start) * (-2.0 * (r + 2.0) / (t[i] * t[i]));
}

ODETrajectory integrate_nag_ode(const Objective& f, const Vector& x0, double r, double t_end, double dt) {
  f.check_dim(x0);
  if (!(r > 0.0)) throw InvalidArgument("r must be positive");
  const std::size_t n = step_count(t_end, dt);
  ODETrajectory traj;
  traj.r = r;
  traj.dt = dt;
  traj.start = x0;

  const double t0 = dt;
  const Vector g0 = f.gradient(x0);
  Vector x = x0 - g0 * (t0 * t0 / (2.0 * (r + 2.0)));
  Vector z = x0 - g0 * (t0 * t0 / (2.0 * r));

  Rhs rhs = [&f, r](double t, const Vector& xs, const Vector& zs) {
    return std::pair{(zs - xs) * (r / t), f.gradient(xs) * (-t / r)};
  };
  // derivative of the expansion against the vector field at t0
  const auto [dx, dz] = rhs(t0, x, z);
  traj.init_residual = std::max(max_abs(dx + g0 * (t0 / (r + 2.0))), max_abs(dz + g0 * (t0 / r)));

  integrate(traj, rhs, std::move(x), std::move(z), n);
  return traj;
}

ODETrajectory integrate_amd_ode(const Objective& psi_star, const Objective& F, const Vector& Z0, double R,
                                double t_end, double dt) {
  psi_star.check_dim(Z0);
  if (F.dim() != psi_star.dim()) throw DimensionMismatch("mirror map and objective dimensions differ");
  if (!(R > 0.0)) throw InvalidArgument("R must be positive");
  const std::size_t n = step_count(t_end, dt);
  ODETrajectory traj;
  traj.mirror = true;
  traj.r = R;
  traj.dt = dt;
  traj.start = Z0;

  const double t0 = dt;
  Vector X = psi_star.gradient(Z0);
  const Vector gF = F.gradient(X);
  Vector Z = Z0 - gF * (t0 * t0 / (2.0 * R));

  Rhs rhs = [&psi_star, &F, R](double t, const Vector& Xs, const Vector& Zs) {
    return std::pair{(psi_star.gradient(Zs) - Xs) * (R / t), F.gradient(Xs) * (-t / R)};
  };
  const auto [dX, dZ] = rhs(t0, X, Z);
  // X is constant to leading order; its derivative is O(t0)
  traj.init_residual = std::max(max_abs(dX) * t0, max_abs(dZ + gF * (t0 / R)));

  integrate(traj, rhs, std::move(X), std::move(Z), n);
  return traj;
}

ODETrajectory integrate_amd_ode(const Objective& psi_star, const Vector& Z0, double R, double t_end, double dt) {
  const QuadraticObjective F(psi_star.dim());
  return integrate_amd_ode(psi_star, F, Z0, R, t_end, dt);
}

std::vector<std::size_t> sample_indices(const ODETrajectory& traj, double t_min, double t_max, int per_decade) {
  std::vector<std::size_t> idx;
  if (traj.t.empty() || per_decade <= 0) return idx;
  const double lo = std::max(t_min, traj.t.front());
  const double hi = std::min(t_max, traj.t.back());
  if (lo > hi) return idx;
  const double ratio = std::pow(10.0, 1.0 / per_decade);
  for (double t = lo;; t *= ratio) {
    const double tt = std::min(t, hi);
    const auto j = static_cast<std::size_t>(
        std::clamp(std::llround(tt / traj.dt) - 1, 0LL, static_cast<long long>(traj.t.size() - 1)));
    if (idx.empty() || idx.back() != j) idx.push_back(j);
    if (t >= hi) break;
  }
  return idx;
}

CorrespondenceReport correspondence_discrepancy(const ODETrajectory& primal, const ODETrajectory& mirror,
                                                double t_min) {
  require_primal(primal, "correspondence");
  if (!mirror.mirror) throw InvalidArgument("correspondence needs a mirror (X, Z) trajectory");
  if (primal.t.size() != mirror.t.size() || primal.dt != mirror.dt) {
    throw InvalidArgument("trajectories must share the time grid");
  }
  CorrespondenceReport rep;
  rep.t_min = t_min;
  for (std::size_t i : sample_indices(primal, t_min, primal.t.back())) {
    rep.max_X_err = std::max(rep.max_X_err, distance(mirror.u[i], primal.p(i)));
    rep.max_Z_err = std::max(rep.max_Z_err, distance(mirror.v[i], primal.u[i]));
  }
  return rep;
}

CorrespondenceReport correspondence_check(const Objective& f, const Vector& x0, double r, double t_end, double dt,
                                          std::optional<double> t_min) {
  const double R = r + 2.0;
  const double start = t_min.value_or(std::min(100.0 * dt, t_end));
  const ODETrajectory fine_x = integrate_nag_ode(f, x0, r, t_end, dt);
  const ODETrajectory fine_X = integrate_amd_ode(f, x0, R, t_end, dt);
  const ODETrajectory coarse_x = integrate_nag_ode(f, x0, r, t_end, 2.0 * dt);
  const ODETrajectory coarse_X = integrate_amd_ode(f, x0, R, t_end, 2.0 * dt);

  CorrespondenceReport rep = correspondence_discrepancy(fine_x, fine_X, start);

  // coarse step j sits at fine step 2j + 1; Richardson: error(dt) ~ |y_dt - y_2dt| / 15
  double trunc = 0.0;
  double scale = 1.0;
  for (std::size_t j : sample_indices(coarse_x, start, coarse_x.t.back())) {
    const std::size_t i = 2 * j + 1;
    if (i >= fine_x.t.size()) break;
    trunc = std::max(trunc, distance(fine_X.u[i], coarse_X.u[j]) + distance(fine_x.p(i), coarse_x.p(j)));
    trunc = std::max(trunc, distance(fine_X.v[i], coarse_X.v[j]) + distance(fine_x.u[i], coarse_x.u[j]));
    scale = std::max({scale, norm(fine_X.u[i]), norm(fine_X.v[i])});
  }
  rep.truncation_estimate = trunc / 15.0;
  rep.pass = rep.max_err() <= 10.0 * rep.truncation_estimate + 1e-12 * scale;
  return rep;
}

ContinuousBoundsReport continuous_bounds(const ODETrajectory& traj, const ODETrajectory& coarse,
                                         const BoundsContext& ctx, double t_min) {
  require_primal(traj, "continuous_bounds");
  require_primal(coarse, "continuous_bounds");
  if (std::abs(coarse.dt - 2.0 * traj.dt) > 1e-12 * traj.dt || coarse.r != traj.r) {
    throw InvalidArgument("coarse trajectory must use the same r and twice the step");
  }
  if (ctx.p_star.size() != traj.start.size()) throw DimensionMismatch("p* dimension differs from the trajectory");

  const double r = traj.r;
  const double D = ctx.D;
  const Vector& ps = ctx.p_star;
  const double ps_sq = norm_sq(ps);
  const bool r2 = std::abs(r - 2.0) <= 1e-12;

  struct Lhs {
    double p_err_sq, p_gap, q_err_sq, q_gap;
  };
  auto lhs_at = [&](const ODETrajectory& tr, std::size_t i) {
    const Vector p = tr.p(i);
    const Vector q = tr.q(i);
    return Lhs{norm_sq(p - ps), norm_sq(p) - ps_sq, norm_sq(q - ps), norm_sq(q) - ps_sq};
  };

  ContinuousBoundsReport rep;
  auto check = [&rep](double lhs, double rhs, double allowance) {
    if (rhs > 0.0) rep.max_slack = std::max(rep.max_slack, lhs / rhs);
    if (!(lhs <= 1.001 * rhs + allowance)) rep.pass = false;
  };

  for (std::size_t j : sample_indices(coarse, std::max(t_min, coarse.t.front()), coarse.t.back())) {
    const std::size_t i = 2 * j + 1;
    if (i >= traj.t.size()) break;
    const double t = traj.t[i];
    const Lhs a = lhs_at(traj, i);
    const Lhs b = lhs_at(coarse, j);

    ContinuousBoundRow row{};
    row.t = t;
    row.p_err_sq = a.p_err_sq;
    row.p_gap = a.p_gap;
    row.q_err_sq = a.q_err_sq;
    row.q_gap = a.q_gap;
    row.truncation = std::max({std::abs(a.p_err_sq - b.p_err_sq), std::abs(a.p_gap - b.p_gap),
                               std::abs(a.q_err_sq - b.q_err_sq), std::abs(a.q_gap - b.q_gap)});
    const double t2 = t * t;
    row.p_gap_bound = 2.0 * (r + 2.0) * (r + 2.0) * D / t2;
    row.q_err_bound = 8.0 * (r + 2.0) * (r + 2.0) * D / t2;
    check(row.p_gap, row.p_gap_bound, row.truncation);
    check(row.q_err_sq, row.q_err_bound, row.truncation);
    if (r2) {
      row.p_err_bound_r2 = 800.0 * D / (9.0 * t2);
      row.q_err_bound_r2 = 128.0 * D / (9.0 * t2);
      check(row.p_err_sq, *row.p_err_bound_r2, row.truncation);
      check(row.q_err_sq, *row.q_err_bound_r2, row.truncation);
      if (ps_sq > 0.0) {
        row.p_gap_bound_r2 = 944.0 * D / (9.0 * t2) + 64.0 * D * D / (ps_sq * t2 * t2);
        check(row.p_gap, *row.p_gap_bound_r2, row.truncation);
      }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<double> continuous_energy(const ODETrajectory& traj, const Objective& f, const Vector& w,
                                      const Vector& p_star, double g_of_w) {
  require_primal(traj, "continuous_energy");
  std::vector<double> V;
  V.reserve(traj.t.size());
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double t2 = traj.t[i] * traj.t[i];
    const double g = f.shifted_value(traj.u[i], p_star);
    V.push_back(0.5 * t2 * (g - g_of_w) + norm_sq(traj.v[i] + p_star * (t2 / 4.0) - w));
  }
  return V;
}

std::vector<Vector> p_by_quadrature(const ODETrajectory& traj, const Objective& f) {
  require_primal(traj, "p_by_quadrature");
  // p(t) = (r+2)/t^{r+2} int_0^t tau^{r+1} grad f(x(tau)) dtau
  const double r = traj.r;
  std::vector<Vector> h;
  h.reserve(traj.t.size());
  for (std::size_t i = 0; i < traj.t.size(); ++i) h.push_back(f.gradient(traj.u[i]) * std::pow(traj.t[i], r + 1.0));
  const double t0 = traj.t.front();
  auto I = cumulative_integral(h, traj.dt, f.gradient(traj.start) * (std::pow(t0, r + 2.0) / (r + 2.0)));
  for (std::size_t i = 0; i < I.size(); ++i) I[i] *= (r + 2.0) / std::pow(traj.t[i], r + 2.0);
  return I;
}

std::vector<Vector> q_by_quadrature(const ODETrajectory& traj, const Objective& f) {
  require_primal(traj, "q_by_quadrature");
  std::vector<Vector> h;
  h.reserve(traj.t.size());
  for (std::size_t i = 0; i < traj.t.size(); ++i) h.push_back(traj.p(i) * traj.t[i]);
  const double t0 = traj.t.front();
  // p(s) -> grad f(x0) as s -> 0
  auto I = cumulative_integral(h, traj.dt, f.gradient(traj.start) * (t0 * t0 / 2.0));
  for (std::size_t i = 0; i < I.size(); ++i) I[i] *= 2.0 / (traj.t[i] * traj.t[i]);
  return I;
}

double fit_loglog_slope(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 2) throw InvalidArgument("slope fit needs two or more matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("slope fit needs positive data");
    const double lx = std::log(t[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw DegenerateInput("slope fit with a single abscissa");
  return (n * sxy - sx * sy) / den;
}

}  // namespace divcert
