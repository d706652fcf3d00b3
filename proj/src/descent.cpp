#include "divcert/descent.hpp"

#include <cmath>
#include <sstream>

#include "divcert/core.hpp"

namespace divcert {

StepSchedule StepSchedule::constant(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("step size must be positive");
  return StepSchedule(Constant{eta});
}

StepSchedule StepSchedule::sequence(std::vector<double> etas) {
  for (double e : etas) {
    if (!(e > 0.0) || !std::isfinite(e)) throw InvalidArgument("step sizes must be positive");
  }
  return StepSchedule(Sequence{std::move(etas)});
}

double StepSchedule::eta(std::size_t i) const {
  if (const auto* c = std::get_if<Constant>(&v_)) return c->eta;
  const auto& s = std::get<Sequence>(v_).etas;
  if (i >= s.size()) throw InvalidArgument("step schedule has only " + std::to_string(s.size()) + " entries");
  return s[i];
}

std::size_t StepSchedule::length() const {
  if (std::holds_alternative<Constant>(v_)) return static_cast<std::size_t>(-1);
  return std::get<Sequence>(v_).etas.size();
}

namespace {

void check_steps(const StepSchedule& sched, std::size_t k_max, double limit, const char* what,
                 std::vector<std::string>& warnings) {
  if (sched.length() < k_max) {
    throw InvalidArgument("step schedule shorter than k_max = " + std::to_string(k_max));
  }
  for (std::size_t i = 0; i < k_max; ++i) {
    if (sched.eta(i) > limit * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "step " << i << " is " << sched.eta(i) << " > " << what << " = " << limit
         << "; rate bounds do not apply";
      warnings.push_back(os.str());
      if (sched.is_constant()) break;
    }
  }
}

}  // namespace

GDTrajectory run_gd(const Objective& f, const Vector& x0, const StepSchedule& sched, std::size_t k_max) {
  f.check_dim(x0);
  GDTrajectory t;
  t.L = f.smoothness();
  t.x0 = x0;
  check_steps(sched, k_max, 1.0 / t.L, "1/L", t.warnings);
  t.x.reserve(k_max + 1);
  t.grad.reserve(k_max + 1);
  t.q.reserve(k_max + 1);
  t.x.push_back(x0);
  t.a.push_back(0.0);
  t.q.emplace_back();
  for (std::size_t k = 0;; ++k) {
    auto [fk, gk] = f.value_and_gradient(t.x[k]);
    if (!std::isfinite(fk) || !gk.all_finite()) {
      throw NonFiniteIterate("gradient descent: non-finite value at iteration " + std::to_string(k));
    }
    t.f.push_back(fk);
    t.grad.push_back(std::move(gk));
    if (k == k_max) break;
    const double eta = sched.eta(k);
    t.eta.push_back(eta);
    Vector next = step_along(t.x[k], eta, t.grad[k]);
    if (!next.all_finite()) {
      throw NonFiniteIterate("gradient descent: iterate " + std::to_string(k + 1) + " overflowed");
    }
    t.x.push_back(std::move(next));
    t.a.push_back(t.a[k] + eta);
    t.q.push_back((t.x[k + 1] - x0) * (-1.0 / t.a[k + 1]));
  }
  return t;
}

GDBounds gd_bounds(std::size_t k, double L, double D, double C0) {
  if (k == 0) throw InvalidArgument("bounds start at k = 1");
  if (!(L > 0.0)) throw InvalidArgument("L must be positive");
  if (!(D >= 0.0)) throw InvalidArgument("D must be nonnegative");
  const double kd = static_cast<double>(k);
  return {2.0 * L * D / kd, 8.0 * L * D / kd, 2.0 * L * D * (C0 + std::log(kd)) / kd};
}

double gd_c0(double grad0_norm_sq, double pstar_norm_sq, double L, double D) {
  if (D <= 0.0) return 1.0;
  return 1.0 + (grad0_norm_sq - pstar_norm_sq) / (2.0 * L * D);
}

namespace {

CertificateReport detect_with_budget(const GDTrajectory& traj, double budget, const std::string& formula) {
  CertificateReport rep;
  rep.witness_kind = "grad";
  rep.bound_formula = formula;
  for (std::size_t k = 1; k < traj.x.size(); ++k) {
    const double thr = 2.0 * budget / traj.a[k];
    const double nsq = norm_sq(traj.grad[k]);
    rep.iterations_checked = k;
    rep.threshold_used = thr;
    rep.witness = traj.grad[k];
    rep.witness_norm_sq = nsq;
    if (nsq > thr) {
      rep.verdict = Verdict::Unbounded;
      rep.trigger_index = k;
      return rep;
    }
  }
  return rep;
}

void check_gd_steps(const GDTrajectory& traj, double L) {
  for (double e : traj.eta) {
    if (e > (1.0 + 1e-12) / L) throw PreconditionViolation("detection needs every step <= 1/L");
  }
}

}  // namespace

CertificateReport detect_unbounded_gd(const GDTrajectory& traj, double L, double M) {
  for (double v : traj.x0) {
    if (v != 0.0) throw PreconditionViolation("GD detection with M + f(0) needs x0 = 0");
  }
  check_gd_steps(traj, L);
  return detect_with_budget(traj, M + traj.f.front(), "|grad f(x_k)|^2 > 2(M + f(0))/a_k");
}

CertificateReport detect_unbounded_gd_from_bound(const GDTrajectory& traj, const Objective& f) {
  check_gd_steps(traj, f.smoothness());
  return detect_with_budget(traj, divergence_upper_bound(f, traj.x0),
                            "|grad f(x_k)|^2 > 2(M + f(x0) + |x0||grad f(x0)|)/a_k");
}

MirrorState run_mirror(const Objective& psi_star, const Objective& F, const Vector& theta0,
                       const StepSchedule& sched, std::size_t k_max) {
  psi_star.check_dim(theta0);
  if (F.dim() != psi_star.dim()) throw DimensionMismatch("mirror map and objective dimensions differ");
  MirrorState st;
  check_steps(sched, k_max, 1.0 / (F.smoothness() * psi_star.smoothness()), "1/(L_F L_psi*)", st.warnings);
  st.theta.reserve(k_max + 1);
  st.X.reserve(k_max + 1);
  st.theta.push_back(theta0);
  st.a.push_back(0.0);
  for (std::size_t k = 0;; ++k) {
    Vector X = psi_star.gradient(st.theta[k]);
    if (!X.all_finite()) throw NonFiniteIterate("mirror descent: non-finite X at iteration " + std::to_string(k));
    st.X.push_back(std::move(X));
    if (k == k_max) break;
    const double eta = sched.eta(k);
    Vector next = step_along(st.theta[k], eta, F.gradient(st.X[k]));
    if (!next.all_finite()) {
      throw NonFiniteIterate("mirror descent: iterate " + std::to_string(k + 1) + " overflowed");
    }
    st.theta.push_back(std::move(next));
    st.a.push_back(st.a[k] + eta);
  }
  return st;
}

std::vector<double> mirror_energy(const MirrorState& st, const Objective& psi_star, const Objective& F,
                                  const Vector& theta_ref) {
  const Vector w = psi_star.gradient(theta_ref);
  const double Fw = F.value(w);
  std::vector<double> V;
  V.reserve(st.theta.size());
  for (std::size_t k = 0; k < st.theta.size(); ++k) {
    V.push_back(st.a[k] * (F.value(st.X[k]) - Fw) + bregman_divergence(psi_star, st.theta[k], theta_ref));
  }
  return V;
}

}  // namespace divcert
