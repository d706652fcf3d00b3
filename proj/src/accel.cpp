#include "divcert/accel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace divcert {

namespace {

// Neumaier-compensated running sum; the prefix sums below reach 1e4 terms and
// are compared against closed forms at 1e-12.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

const char* schedule_kind_name(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::NesterovMax:
      return "nesterov";
    case ScheduleKind::Polynomial:
      return "polynomial";
    case ScheduleKind::Custom:
      return "custom";
  }
  return "?";
}

ScheduleA ScheduleA::nesterov(double L, std::size_t k_max) {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("L must be positive");
  const std::size_t n = k_max + 3;
  std::vector<double> A(n + 1, 0.0);
  std::vector<double> alpha(n, 0.0);
  alpha[0] = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) alpha[k] = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * alpha[k - 1] * alpha[k - 1]));
    A[k + 1] = A[k] + 4.0 * alpha[k] / L;
  }
  ScheduleA s(ScheduleKind::NesterovMax, L, std::move(A));
  s.alpha_ = std::move(alpha);
  return s;
}

ScheduleA ScheduleA::polynomial(double L, std::size_t k_max) {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("L must be positive");
  std::vector<double> A(k_max + 4);
  for (std::size_t k = 0; k < A.size(); ++k) {
    const double kd = static_cast<double>(k);
    A[k] = kd * (kd + 1.0) / L;
  }
  return ScheduleA(ScheduleKind::Polynomial, L, std::move(A));
}

ScheduleA ScheduleA::custom(std::vector<double> A, double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("L must be positive");
  if (A.size() < 3) throw InvalidCustomSchedule("a custom schedule needs at least A_0, A_1, A_2");
  if (A[0] != 0.0) throw InvalidCustomSchedule("custom schedule must start at A_0 = 0");
  for (std::size_t k = 0; k + 1 < A.size(); ++k) {
    const double d = A[k + 1] - A[k];
    if (!std::isfinite(A[k + 1]) || !(d > 0.0)) {
      throw InvalidCustomSchedule("custom schedule must be strictly increasing (fails at k = " + std::to_string(k) +
                                  ")");
    }
    const double cap = 2.0 * std::sqrt(A[k + 1] / L);
    if (d > cap * (1.0 + 1e-12) + 1e-12) {
      throw InvalidCustomSchedule("custom schedule increment at k = " + std::to_string(k) + " is " +
                                  std::to_string(d) + " > 2 sqrt(A_{k+1}/L) = " + std::to_string(cap));
    }
  }
  return ScheduleA(ScheduleKind::Custom, L, std::move(A));
}

ScheduleA make_schedule(ScheduleKind kind, double L, std::size_t k_max) {
  switch (kind) {
    case ScheduleKind::NesterovMax:
      return ScheduleA::nesterov(L, k_max);
    case ScheduleKind::Polynomial:
      return ScheduleA::polynomial(L, k_max);
    case ScheduleKind::Custom:
      break;
  }
  throw InvalidArgument("custom schedules are built from an explicit A list");
}

double ScheduleA::A(std::size_t k) const {
  if (k >= A_.size()) {
    throw InvalidArgument("schedule defined up to A_" + std::to_string(A_.size() - 1) + ", asked for A_" +
                          std::to_string(k));
  }
  return A_[k];
}

double ScheduleA::alpha(std::size_t k) const {
  if (kind_ == ScheduleKind::NesterovMax && k < alpha_.size()) return alpha_[k];
  return 0.25 * L_ * delta(k);
}

double ScheduleA::step_coefficient(std::size_t k) const {
  if (kind_ == ScheduleKind::Polynomial) {
    const double kd = static_cast<double>(k);
    return (kd + 1.0) / ((kd + 2.0) * L_);
  }
  if (kind_ == ScheduleKind::NesterovMax) return 1.0 / L_;
  const double d = delta(k);
  return d * d / (4.0 * A(k + 1));
}

double ScheduleA::momentum_coefficient(std::size_t k) const {
  if (kind_ == ScheduleKind::Polynomial) {
    const double kd = static_cast<double>(k);
    return kd / (kd + 3.0);
  }
  if (kind_ == ScheduleKind::NesterovMax) {
    (void)A(k + 2);
    return (alpha(k) - 1.0) / alpha(k + 1);
  }
  return A(k) * delta(k + 1) / (A(k + 2) * delta(k));
}

double ScheduleA::step_condition_excess(std::size_t k_max) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double cap = 2.0 * std::sqrt(A(k + 1) / L_);
    worst = std::max(worst, delta(k) / cap - 1.0);
  }
  return worst;
}

// ---------------------------------------------------------------------------

NagStepper::NagStepper(const Objective& f, Vector x0, const ScheduleA& sched) : f_(f), s_(sched) {
  f.check_dim(x0);
  x_ = x0;
  x_prev_ = x0;
  y_ = std::move(x0);
}

void NagStepper::step() {
  if (y_.empty()) throw InvalidArgument("schedule too short to continue the recursion");
  grad_ = f_.gradient(y_);
  if (!grad_.all_finite()) throw NonFiniteIterate("accelerated method: non-finite gradient at k = " + std::to_string(k_));
  Vector next = step_along(y_, s_.step_coefficient(k_), grad_);
  if (!next.all_finite()) throw NonFiniteIterate("accelerated method: x overflowed at k = " + std::to_string(k_ + 1));
  x_prev_ = std::move(x_);
  x_ = std::move(next);
  if (k_ + 2 <= s_.last_index()) {
    const double m = s_.momentum_coefficient(k_);
    Vector y(x_.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x_[i] + m * (x_[i] - x_prev_[i]);
    y_ = std::move(y);
  } else {
    y_ = Vector();
  }
  ++k_;
}

NAGTrajectory run_nag(const Objective& f, const Vector& x0, const ScheduleA& sched, std::size_t k_max) {
  if (k_max > sched.max_k()) {
    throw InvalidArgument("schedule supports k_max <= " + std::to_string(sched.max_k()));
  }
  NAGTrajectory t;
  t.x0 = x0;
  t.x.reserve(k_max + 2);
  t.y.reserve(k_max + 1);
  t.z.reserve(k_max + 2);
  t.grad_y.reserve(k_max + 1);
  NagStepper st(f, x0, sched);
  t.x.push_back(x0);
  t.z.push_back(x0);
  t.f_x.push_back(f.value(x0));
  t.S1.push_back(0.0);
  t.S0.push_back(0.0);
  CompensatedSum s1, s0;
  for (std::size_t k = 0; k <= k_max; ++k) {
    t.y.push_back(st.y());
    st.step();
    t.grad_y.push_back(st.last_grad());
    t.x.push_back(st.x());
    t.f_x.push_back(f.value(st.x()));
    t.z.push_back(step_along(t.z[k], 0.25 * sched.delta(k), st.last_grad()));
    if (k >= 1) {
      s1.add(sched.A(k) * sched.delta(k));
      s0.add(sched.A(k) * sched.delta(k - 1));
      t.S1.push_back(s1.value());
      t.S0.push_back(s0.value());
    }
  }
  return t;
}

ThreeSequenceTrajectory run_nag_three_sequence(const Objective& f, const Vector& x0, const ScheduleA& sched,
                                               std::size_t k_max) {
  f.check_dim(x0);
  ThreeSequenceTrajectory t;
  t.x.push_back(x0);
  t.z.push_back(x0);
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double Ak = sched.A(k);
    const double Ak1 = sched.A(k + 1);
    const double d = sched.delta(k);
    const Vector& xk = t.x[k];
    const Vector& zk = t.z[k];
    t.y.push_back(xk + (zk - xk) * (d / Ak1));
    const Vector g = f.gradient(t.y[k]);
    if (!g.all_finite()) throw NonFiniteIterate("three-sequence form: non-finite gradient");
    t.z.push_back(zk - g * (0.25 * d));
    t.x.push_back((xk * Ak + t.z[k + 1] * d) / Ak1);
  }
  return t;
}

// ---------------------------------------------------------------------------

CertificateSeries certificates(const NAGTrajectory& traj, const ScheduleA& sched) {
  const std::size_t K = traj.k_max();
  CertificateSeries c;
  c.x0 = traj.x0;
  c.p.resize(K + 1);
  c.q.resize(K + 1);
  c.P.assign(K + 1, 0.0);
  c.Q.assign(K + 1, 0.0);
  for (std::size_t k = 1; k <= K; ++k) {
    const double Ak = sched.A(k);
    double P = 4.0 * Ak * sched.A(k + 1) / (sched.delta(k) * traj.S1[k]);
    double Q = 4.0 * Ak / traj.S0[k];
    if (sched.kind() == ScheduleKind::Polynomial) {
      const double kd = static_cast<double>(k);
      const double Pc = 12.0 * sched.L() / (3.0 * kd + 5.0);
      const double Qc = 24.0 * sched.L() / ((kd + 2.0) * (3.0 * kd + 1.0));
      if (std::abs(P - Pc) > 1e-12 * Pc || std::abs(Q - Qc) > 1e-12 * Qc) {
        throw std::logic_error("certificate coefficients disagree with their closed forms at k = " +
                               std::to_string(k));
      }
      P = Pc;
      Q = Qc;
    }
    c.P[k] = P;
    c.Q[k] = Q;
    c.p[k] = (traj.x[k + 1] - traj.x[k]) * (-P);
    c.q[k] = (traj.x[k] - traj.x0) * (-Q);
  }
  return c;
}

Vector p_as_average(const NAGTrajectory& traj, const ScheduleA& sched, std::size_t k) {
  if (k == 0 || k > traj.k_max()) throw InvalidArgument("p average defined for 1 <= k <= K");
  Vector acc(traj.x0.size());
  for (std::size_t j = 1; j <= k; ++j) acc += traj.grad_y[j] * (sched.A(j) * sched.delta(j));
  return acc / traj.S1[k];
}

std::vector<double> q_weights(const NAGTrajectory& traj, const ScheduleA& sched, std::size_t k) {
  if (k == 0 || k > traj.k_max()) throw InvalidArgument("q weights defined for 1 <= k <= K");
  const double lead = sched.A(k) / traj.S0[k];
  std::vector<double> w;
  w.push_back(lead * sched.A(1));
  for (std::size_t j = 1; j < k; ++j) {
    w.push_back(lead * (traj.S0[j + 1] / sched.A(j + 1) - traj.S0[j] / sched.A(j)));
  }
  return w;
}

// ---------------------------------------------------------------------------

BoundSeries bound_series(const ScheduleA& sched, const BoundsContext& ctx, std::size_t k_max) {
  if (!(ctx.D >= 0.0)) throw InvalidArgument("D must be nonnegative");
  BoundSeries b;
  const std::size_t n = k_max + 1;
  b.B.assign(n, 0.0);
  b.C.assign(n, 0.0);
  b.Cp.assign(n, 0.0);
  b.Bt.assign(n, 0.0);
  b.Ct.assign(n, std::nullopt);
  b.Ctp.assign(n, std::nullopt);
  b.has_caps = sched.kind() == ScheduleKind::Polynomial;
  if (b.has_caps) {
    b.B_cap.assign(n, 0.0);
    b.C_cap.assign(n, 0.0);
    b.Cp_cap.assign(n, 0.0);
    b.Bt_cap.assign(n, 0.0);
    b.Ct_cap.assign(n, 0.0);
    b.Ctp_cap.assign(n, 0.0);
  }
  const double L = sched.L();
  const double lead_q = ctx.D > 0.0 ? sched.A(1) * ctx.grad_g_dot_pstar / ctx.D : 0.0;
  CompensatedSum s1, s0, r, t;  // t = sum_{i<k} delta_i / A_i
  for (std::size_t k = 1; k < n; ++k) {
    const double Ak = sched.A(k);
    s1.add(Ak * sched.delta(k));
    s0.add(Ak * sched.delta(k - 1));
    r.add(std::sqrt(Ak) * sched.delta(k - 1));
    if (k >= 2) t.add(sched.delta(k - 1) / sched.A(k - 1));
    const double S1 = s1.value();
    const double S0 = s0.value();
    const double R = r.value();
    const double pb = (Ak * std::sqrt(sched.A(k + 1)) + R) / S1;
    b.B[k] = 8.0 * pb * pb;
    b.C[k] = 4.0 * sched.A(k + 1) / S1;
    b.Cp[k] = b.B[k] + 2.0 * b.C[k];
    const double qb = R / S0;
    b.Bt[k] = 8.0 * qb * qb;
    if (ctx.D > 0.0) {
      const double ct = Ak / S0 * (lead_q + 4.0 * t.value());
      b.Ct[k] = ct;
      b.Ctp[k] = b.Bt[k] + 2.0 * ct;
    }
    if (b.has_caps) {
      const double kd = static_cast<double>(k);
      const double lk = std::log(kd);
      const double c = ctx.ct_offset;
      b.B_cap[k] = 800.0 * L / ((3.0 * kd + 5.0) * (3.0 * kd + 5.0));
      b.C_cap[k] = 24.0 * L / (kd * (3.0 * kd + 5.0));
      b.Cp_cap[k] = 944.0 * L / (3.0 * kd * (3.0 * kd + 5.0));
      b.Bt_cap[k] = 128.0 * L / ((3.0 * kd + 1.0) * (3.0 * kd + 1.0));
      b.Ct_cap[k] = 48.0 * L * (c + 1.0 + lk) / ((kd + 2.0) * (3.0 * kd + 1.0));
      b.Ctp_cap[k] = 96.0 * L * (c + 2.0 + lk) / ((kd + 2.0) * (3.0 * kd + 1.0));
    }
  }
  return b;
}

CertificateBounds certificate_bounds(const BoundSeries& b, const BoundsContext& ctx, std::size_t k) {
  if (k == 0 || k >= b.B.size()) throw InvalidArgument("bound index out of range");
  CertificateBounds out{b.B[k] * ctx.D, b.Bt[k] * ctx.D, std::nullopt, std::nullopt};
  const double ps = norm_sq(ctx.p_star);
  if (ps > 0.0) {
    out.p_gap = b.Cp[k] * ctx.D + b.C[k] * b.C[k] * ctx.D * ctx.D / ps;
    if (b.Ct[k]) out.q_gap = *b.Ctp[k] * ctx.D + *b.Ct[k] * *b.Ct[k] * ctx.D * ctx.D / ps;
  }
  return out;
}

// ---------------------------------------------------------------------------

DiscreteEnergy energy_series(const NAGTrajectory& traj, const ScheduleA& sched, const Objective& f,
                             const Vector& w, const Vector& p_star, double g_of_w) {
  f.check_dim(w);
  f.check_dim(p_star);
  DiscreteEnergy e;
  const std::size_t n = traj.x.size();
  const double pn = norm(p_star);
  const double wn = norm(w);
  for (std::size_t k = 0; k < n; ++k) {
    const double Ak = sched.A(k);
    const double gx = f.shifted_value(traj.x[k], p_star);
    const Vector u = traj.z[k] + p_star * (0.25 * Ak) - w;
    e.V.push_back(0.5 * Ak * (gx - g_of_w) + norm_sq(u));
    const double zs = norm(traj.z[k]) + 0.25 * Ak * pn + wn;
    e.scale.push_back(1.0 + 0.5 * Ak * (std::abs(traj.f_x[k]) + std::abs(dot(p_star, traj.x[k])) + std::abs(g_of_w)) +
                      zs * zs);
    if (k + 1 < n) {
      e.decrement.push_back(-sched.A(k) * sched.delta(k) / 8.0 * dot(traj.grad_y[k] - p_star, p_star));
    }
  }
  return e;
}

// ---------------------------------------------------------------------------

namespace {

CertificateReport scan(const std::vector<Vector>& cert, const std::vector<double>& coef, double budget,
                       const char* kind, const char* formula) {
  CertificateReport rep;
  rep.witness_kind = kind;
  rep.bound_formula = formula;
  for (std::size_t k = 1; k < cert.size() && k < coef.size(); ++k) {
    const double thr = coef[k] * budget;
    const double nsq = norm_sq(cert[k]);
    rep.iterations_checked = k;
    rep.threshold_used = thr;
    rep.witness = cert[k];
    rep.witness_norm_sq = nsq;
    if (nsq > thr) {
      rep.verdict = Verdict::Unbounded;
      rep.trigger_index = k;
      return rep;
    }
  }
  return rep;
}

std::optional<std::size_t> first_below(const std::vector<double>& coef, double target) {
  for (std::size_t k = 1; k < coef.size(); ++k) {
    if (coef[k] < target) return k;
  }
  return std::nullopt;
}

}  // namespace

NagDetection detect_unbounded_nag(const CertificateSeries& certs, const BoundSeries& bounds, double M, double f0,
                                  const std::optional<Vector>& p_star) {
  for (double v : certs.x0) {
    if (v != 0.0) throw PreconditionViolation("NAG detection with M + f(0) needs x0 = 0");
  }
  const double budget = M + f0;
  NagDetection d;
  d.p = scan(certs.p, bounds.B, budget, "p", "|p^(k)|^2 > B_k (M + f(0))");
  d.q = scan(certs.q, bounds.Bt, budget, "q", "|q^(k)|^2 > Bt_k (M + f(0))");
  if (p_star && norm_sq(*p_star) > 0.0) {
    const double target = budget > 0.0 ? norm_sq(*p_star) / budget : std::numeric_limits<double>::infinity();
    d.guaranteed_q = first_below(bounds.Bt, target);
    d.guaranteed_p = first_below(bounds.B, target);
  }
  return d;
}

OnlineDetection certify_nag(const Objective& f, std::size_t budget) {
  const auto M = f.conjugate_bound();
  if (!M) throw MissingConjugateBound(f.name() + ": detection needs a bound M on the conjugate");
  if (budget == 0) throw InvalidArgument("budget must be positive");
  const double L = f.smoothness();
  const ScheduleA sched = ScheduleA::polynomial(L, budget);
  BoundsContext ctx;
  ctx.p_star = Vector(f.dim());
  const BoundSeries bounds = bound_series(sched, ctx, budget);

  const Vector x0(f.dim());
  const double scale = *M + f.value(x0);
  OnlineDetection out;
  out.p.witness_kind = "p";
  out.p.bound_formula = "|p^(k)|^2 > B_k (M + f(0))";
  out.q.witness_kind = "q";
  out.q.bound_formula = "|q^(k)|^2 > Bt_k (M + f(0))";

  NagStepper st(f, x0, sched);
  for (std::size_t k = 0; k <= budget; ++k) {
    const Vector xk = st.x();
    st.step();
    if (k == 0) continue;
    const double kd = static_cast<double>(k);
    const Vector p = (st.x() - xk) * (-12.0 * L / (3.0 * kd + 5.0));
    const Vector q = xk * (-24.0 * L / ((kd + 2.0) * (3.0 * kd + 1.0)));
    auto update = [k](CertificateReport& r, const Vector& w, double thr) {
      r.iterations_checked = k;
      r.witness = w;
      r.witness_norm_sq = norm_sq(w);
      r.threshold_used = thr;
      if (r.witness_norm_sq > thr) {
        r.verdict = Verdict::Unbounded;
        r.trigger_index = k;
      }
    };
    out.estimate = p;
    out.stop_index = k;
    update(out.q, q, bounds.Bt[k] * scale);
    update(out.p, p, bounds.B[k] * scale);
    if (out.q.trigger_index) {
      out.report = out.q;
      return out;
    }
    if (out.p.trigger_index) {
      out.report = out.p;
      return out;
    }
  }
  out.report = out.q;
  return out;
}

std::optional<double> geometric_value_bound(double A_k, const NewtonPolytopeStats& st) {
  const double m2 = static_cast<double>(st.m * st.m);
  const double phi2 = st.phi * st.phi;
  if (!(A_k > m2 / (st.beta * phi2))) return std::nullopt;
  const double l = std::log(st.beta * phi2 * A_k / m2);
  return 2.0 * m2 / (phi2 * A_k) * (1.0 + l * l);
}

}  // namespace divcert
