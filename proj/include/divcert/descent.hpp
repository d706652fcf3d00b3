#pragma once

#include <string>
#include <variant>
#include <vector>

#include "divcert/certificate.hpp"
#include "divcert/objective.hpp"

namespace divcert {

class StepSchedule {
 public:
  struct Constant {
    double eta;
  };
  struct Sequence {
    std::vector<double> etas;
  };

  static StepSchedule constant(double eta);
  static StepSchedule sequence(std::vector<double> etas);

  /// Step used to go from iterate i to i + 1.
  double eta(std::size_t i) const;
  /// Number of steps available (unbounded for a constant schedule).
  std::size_t length() const;
  bool is_constant() const { return std::holds_alternative<Constant>(v_); }

 private:
  explicit StepSchedule(std::variant<Constant, Sequence> v) : v_(std::move(v)) {}
  std::variant<Constant, Sequence> v_;
};

struct GDTrajectory {
  Vector x0;
  std::vector<Vector> x;     // k = 0..K
  std::vector<Vector> grad;  // grad f(x_k)
  std::vector<Vector> q;     // -(x_k - x0)/a_k; q[0] is left empty
  std::vector<double> f;
  std::vector<double> a;     // a_0 = 0, a_{k+1} = a_k + eta_k
  std::vector<double> eta;   // eta_k, k = 0..K-1
  std::vector<std::string> warnings;
  double L = 0.0;

  std::size_t k_max() const { return x.size() - 1; }
};

/// x_{k+1} = x_k - eta_k grad f(x_k). Steps above 1/L are allowed but noted in
/// warnings. Throws NonFiniteIterate if an iterate overflows.
GDTrajectory run_gd(const Objective& f, const Vector& x0, const StepSchedule& sched, std::size_t k_max);

struct GDBounds {
  double p_bound;      // on |grad f(x_k)|^2 - |p*|^2 and |grad f(x_k) - p*|^2
  double q_bound;      // on |q_k - p*|^2
  double q_gap_bound;  // on |q_k|^2 - |p*|^2
};

/// Bounds for the constant step 1/L. C0 is supplied by the caller, see gd_c0.
GDBounds gd_bounds(std::size_t k, double L, double D, double C0);

/// 1 + (|grad f(x0)|^2 - |p*|^2) / (2 L D); 1 when D = 0.
double gd_c0(double grad0_norm_sq, double pstar_norm_sq, double L, double D);

/// Requires x0 = 0 and every step <= 1/L. Triggers at the first k >= 1 with
/// |grad f(x_k)|^2 > 2 (M + f(0)) / a_k.
CertificateReport detect_unbounded_gd(const GDTrajectory& traj, double L, double M);

/// Any x0: the threshold uses divergence_upper_bound(f, x0) in place of M + f(0).
CertificateReport detect_unbounded_gd_from_bound(const GDTrajectory& traj, const Objective& f);

struct MirrorState {
  std::vector<Vector> theta;  // dual iterates
  std::vector<Vector> X;      // grad psi*(theta_k)
  std::vector<double> a;
  std::vector<std::string> warnings;
};

/// theta_{k+1} = theta_k - eta_k grad F(X_k), X_k = grad psi*(theta_k).
MirrorState run_mirror(const Objective& psi_star, const Objective& F, const Vector& theta0,
                       const StepSchedule& sched, std::size_t k_max);

/// a_k (F(X_k) - F(w)) + D_{psi*}(theta_k, w) with w = grad psi*(theta_ref),
/// where the divergence is the Bregman divergence of psi* at theta_ref.
std::vector<double> mirror_energy(const MirrorState& st, const Objective& psi_star, const Objective& F,
                                  const Vector& theta_ref);

}  // namespace divcert
