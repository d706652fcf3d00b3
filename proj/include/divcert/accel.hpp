#pragma once

#include <optional>
#include <string>
#include <vector>

#include "divcert/certificate.hpp"
#include "divcert/dualgeom.hpp"
#include "divcert/objective.hpp"

namespace divcert {

enum class ScheduleKind { NesterovMax, Polynomial, Custom };

const char* schedule_kind_name(ScheduleKind k);

/// Increasing weights A_0 = 0 < A_1 < ... with 0 < A_{k+1} - A_k <= 2 sqrt(A_{k+1}/L).
class ScheduleA {
 public:
  /// Largest admissible increments; alpha_k = (L/4)(A_{k+1} - A_k) follows
  /// alpha_0 = 1, alpha_{k+1} = (1 + sqrt(1 + 4 alpha_k^2)) / 2.
  static ScheduleA nesterov(double L, std::size_t k_max);
  /// A_k = k(k+1)/L
  static ScheduleA polynomial(double L, std::size_t k_max);
  /// Validates the increment condition; throws InvalidCustomSchedule.
  static ScheduleA custom(std::vector<double> A, double L);

  ScheduleKind kind() const { return kind_; }
  double L() const { return L_; }
  double A(std::size_t k) const;
  double delta(std::size_t k) const { return A(k + 1) - A(k); }
  /// (L/4) delta(k); the Nesterov recursion value for that schedule.
  double alpha(std::size_t k) const;
  /// Last index with A defined.
  std::size_t last_index() const { return A_.size() - 1; }
  /// Largest k_max a trajectory can be run to (needs A up to k_max + 1).
  std::size_t max_k() const { return A_.size() - 2; }

  /// delta_k^2 / (4 A_{k+1}); (k+1)/((k+2)L) in closed form for the polynomial schedule.
  double step_coefficient(std::size_t k) const;
  /// A_k delta_{k+1} / (A_{k+2} delta_k); k/(k+3) for the polynomial schedule and
  /// (alpha_k - 1)/alpha_{k+1} for the Nesterov schedule.
  double momentum_coefficient(std::size_t k) const;

  /// Largest relative violation of the increment condition over k <= k_max
  /// (<= 0 when satisfied).
  double step_condition_excess(std::size_t k_max) const;

 private:
  ScheduleA(ScheduleKind kind, double L, std::vector<double> A) : kind_(kind), L_(L), A_(std::move(A)) {}
  ScheduleKind kind_;
  double L_;
  std::vector<double> A_;
  std::vector<double> alpha_;
};

ScheduleA make_schedule(ScheduleKind kind, double L, std::size_t k_max);

struct NAGTrajectory {
  Vector x0;
  std::vector<Vector> x;       // x^(0..K+1)
  std::vector<Vector> y;       // y^(0..K)
  std::vector<Vector> z;       // z^(0..K+1), z^(k+1) = z^(k) - (delta_k/4) grad f(y^(k))
  std::vector<Vector> grad_y;  // grad f(y^(k)), k = 0..K
  std::vector<double> f_x;     // f(x^(k)), k = 0..K+1
  std::vector<double> S1;      // sum_{i=1..k} A_i delta_i, k = 0..K
  std::vector<double> S0;      // sum_{i=1..k} A_i delta_{i-1}, k = 0..K

  std::size_t k_max() const { return y.size() - 1; }
};

/// Two-sequence recursion, one step at a time. Shared by run_nag and the
/// early-stopping detector.
class NagStepper {
 public:
  NagStepper(const Objective& f, Vector x0, const ScheduleA& sched);

  /// Evaluates grad f(y^(k)) and moves to k + 1.
  void step();

  std::size_t k() const { return k_; }
  const Vector& x() const { return x_; }
  const Vector& x_prev() const { return x_prev_; }
  const Vector& y() const { return y_; }
  /// grad f(y^(k-1)) from the last step.
  const Vector& last_grad() const { return grad_; }

 private:
  const Objective& f_;
  const ScheduleA& s_;
  std::size_t k_ = 0;
  Vector x_, x_prev_, y_, grad_;
};

/// Runs the two-sequence form to x^(k_max+1).
NAGTrajectory run_nag(const Objective& f, const Vector& x0, const ScheduleA& sched, std::size_t k_max);

struct ThreeSequenceTrajectory {
  std::vector<Vector> x, y, z;
};

/// The (x, y, z) form, kept for cross-checking run_nag.
ThreeSequenceTrajectory run_nag_three_sequence(const Objective& f, const Vector& x0, const ScheduleA& sched,
                                               std::size_t k_max);

struct CertificateSeries {
  Vector x0;
  std::vector<Vector> p;  // p^(k) = -P_k (x^(k+1) - x^(k)); index 0 unused
  std::vector<Vector> q;  // q^(k) = -Q_k (x^(k) - x0); index 0 unused
  std::vector<double> P;
  std::vector<double> Q;
};

/// P_k = 4 A_k A_{k+1} / (delta_k S1_k), Q_k = 4 A_k / S0_k. For the
/// polynomial schedule both are also evaluated in closed form and must agree
/// to 1e-12 relative (std::logic_error otherwise).
CertificateSeries certificates(const NAGTrajectory& traj, const ScheduleA& sched);

/// sum_{j<=k} A_j delta_j grad f(y^(j)) / S1_k
Vector p_as_average(const NAGTrajectory& traj, const ScheduleA& sched, std::size_t k);

/// Weights of q^(k) over (grad f(x0), p^(1), ..., p^(k-1)).
std::vector<double> q_weights(const NAGTrajectory& traj, const ScheduleA& sched, std::size_t k);

struct BoundSeries {
  std::vector<double> B, C, Cp, Bt;          // index k = 1..K (0 unused)
  std::vector<std::optional<double>> Ct, Ctp;  // not applicable when D = 0
  // closed-form caps, polynomial schedule only
  std::vector<double> B_cap, C_cap, Cp_cap, Bt_cap, Ct_cap, Ctp_cap;
  bool has_caps = false;
};

BoundSeries bound_series(const ScheduleA& sched, const BoundsContext& ctx, std::size_t k_max);

/// Right-hand sides of the certificate bounds at index k.
struct CertificateBounds {
  double p_err;                    // B_k D
  double q_err;                    // Bt_k D
  std::optional<double> p_gap;     // C'_k D + C_k^2 D^2 / |p*|^2 (p* != 0)
  std::optional<double> q_gap;     // Ct'_k D + Ct_k^2 D^2 / |p*|^2 (p* != 0, D > 0)
};

CertificateBounds certificate_bounds(const BoundSeries& b, const BoundsContext& ctx, std::size_t k);

struct DiscreteEnergy {
  std::vector<double> V;          // k = 0..K+1
  std::vector<double> scale;      // rounding scale per k
  std::vector<double> decrement;  // -(A_k delta_k / 8) <grad g(y^(k)), p*>, k = 0..K
};

/// (A_k/2)(g(x^(k)) - g(w)) + |z^(k) + (A_k/4) p* - w|^2 with g = f - <p*, .>.
DiscreteEnergy energy_series(const NAGTrajectory& traj, const ScheduleA& sched, const Objective& f,
                             const Vector& w, const Vector& p_star, double g_of_w);

struct NagDetection {
  CertificateReport p;
  CertificateReport q;
  /// first k with Bt_k < |p*|^2 / (M + f(0)) (resp. B_k), when p* is known
  std::optional<std::size_t> guaranteed_q;
  std::optional<std::size_t> guaranteed_p;
};

/// Requires x0 = 0. Triggers when |q^(k)|^2 > Bt_k (M + f(0)) (resp. p with B_k).
NagDetection detect_unbounded_nag(const CertificateSeries& certs, const BoundSeries& bounds, double M, double f0,
                                  const std::optional<Vector>& p_star = std::nullopt);

/// Polynomial schedule from x0 = 0, checking both detectors after every
/// step and stopping at the first trigger or at `budget`. On a simultaneous
/// trigger the q report wins. Throws MissingConjugateBound without M.
struct OnlineDetection {
  CertificateReport report;  // the one that fired, or the q report at the budget
  CertificateReport p;
  CertificateReport q;
  /// p^(k) at the stopping index: the closer estimate of p* early on, even
  /// when the q detector is the one that fired
  Vector estimate;
  std::size_t stop_index = 0;
};

OnlineDetection certify_nag(const Objective& f, std::size_t budget);

/// 2 m^2/(phi^2 A)(1 + log^2(beta phi^2 A / m^2)) when A > m^2/(beta phi^2).
std::optional<double> geometric_value_bound(double A_k, const NewtonPolytopeStats& st);

}  // namespace divcert
