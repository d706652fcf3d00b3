#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "divcert/dualgeom.hpp"
#include "divcert/objective.hpp"
#include "divcert/objectives.hpp"

namespace divcert {

/// Fixed-step RK4 solution sampled at every step, t_j = (j + 1) dt.
/// For the primal system (u, v) = (x, z); for the mirror system (u, v) = (X, Z).
struct ODETrajectory {
  bool mirror = false;
  double r = 0.0;  // r for the primal system, R for the mirror system
  double dt = 0.0;
  Vector start;    // x(0) or Z(0)
  std::vector<double> t;
  std::vector<Vector> u;
  std::vector<Vector> v;
  /// max-norm mismatch between the series derivative and the right-hand side at t0
  double init_residual = 0.0;

  /// r(r+2)/t^2 (x - z). Primal system only.
  Vector p(std::size_t i) const;
  /// -2(r+2)/t^2 (x - x(0)). Primal system only.
  Vector q(std::size_t i) const;
};

/// x' = (r/t)(z - x), z' = -(t/r) grad f(x), started at t0 = dt from the
/// second-order expansion x(t0) = x0 - t0^2/(2(r+2)) grad f(x0),
/// z(t0) = x0 - t0^2/(2r) grad f(x0).
ODETrajectory integrate_nag_ode(const Objective& f, const Vector& x0, double r, double t_end, double dt);

/// X' = (R/t)(grad psi*(Z) - X), Z' = -(t/R) grad F(X), started at t0 = dt from
/// X(t0) = grad psi*(Z0), Z(t0) = Z0 - t0^2/(2R) grad F(X(t0)).
ODETrajectory integrate_amd_ode(const Objective& psi_star, const Objective& F, const Vector& Z0, double R,
                                double t_end, double dt);
/// Norm-minimization case, F = |.|^2/2.
ODETrajectory integrate_amd_ode(const Objective& psi_star, const Vector& Z0, double R, double t_end, double dt);

/// Step indices at roughly `per_decade` geometrically spaced times in [t_min, t_max].
std::vector<std::size_t> sample_indices(const ODETrajectory& traj, double t_min, double t_max, int per_decade = 32);

struct CorrespondenceReport {
  double max_X_err = 0.0;  // |X - r(r+2)/t^2 (x - z)|
  double max_Z_err = 0.0;  // |Z - x|
  double truncation_estimate = 0.0;
  double t_min = 0.0;
  bool pass = false;

  double max_err() const { return std::max(max_X_err, max_Z_err); }
};

/// Integrates both systems (R = r + 2, psi* = f) at dt and at 2 dt; the
/// difference between the two runs estimates the truncation error. Samples
/// start at t_min (default 100 dt, capped at t_end).
CorrespondenceReport correspondence_check(const Objective& f, const Vector& x0, double r, double t_end, double dt,
                                          std::optional<double> t_min = std::nullopt);

/// Same comparison for already integrated trajectories, without a pass verdict.
CorrespondenceReport correspondence_discrepancy(const ODETrajectory& primal, const ODETrajectory& mirror,
                                                double t_min);

struct ContinuousBoundRow {
  double t;
  double p_err_sq, p_gap, q_err_sq, q_gap;
  double p_gap_bound;      // 2(r+2)^2 D / t^2
  double q_err_bound;      // 8(r+2)^2 D / t^2
  std::optional<double> p_err_bound_r2;  // 800 D / (9 t^2)
  std::optional<double> p_gap_bound_r2;  // 944 D / (9 t^2) + 64 D^2 / (|p*|^2 t^4)
  std::optional<double> q_err_bound_r2;  // 128 D / (9 t^2)
  double truncation;       // allowance from the 2 dt comparison
};

struct ContinuousBoundsReport {
  std::vector<ContinuousBoundRow> rows;
  double max_slack = 0.0;  // max over rows and families of lhs / rhs
  bool pass = true;
};

/// Checks every continuous-time bound family at the sampled times. `coarse`,
/// the same system integrated at 2 dt, supplies the truncation allowance;
/// each check is lhs <= 1.001 rhs + truncation.
ContinuousBoundsReport continuous_bounds(const ODETrajectory& traj, const ODETrajectory& coarse,
                                         const BoundsContext& ctx, double t_min = 0.0);

/// (t^2/2)(g(x) - g(w)) + |z + t^2 p*/4 - w|^2 at every step (r = 2).
std::vector<double> continuous_energy(const ODETrajectory& traj, const Objective& f, const Vector& w,
                                      const Vector& p_star, double g_of_w);

/// (r+2)/t^(r+2) int_0^t tau^(r+1) grad f(x(tau)) dtau at every step (4-point
/// cubic rule on the stored grid; [0, t0] by the leading-order term).
std::vector<Vector> p_by_quadrature(const ODETrajectory& traj, const Objective& f);

/// (2/t^2) int_0^t s p(s) ds at every step.
std::vector<Vector> q_by_quadrature(const ODETrajectory& traj, const Objective& f);

/// Least-squares slope of log(y) against log(t).
double fit_loglog_slope(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace divcert
