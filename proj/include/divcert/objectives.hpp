#pragma once

#include <vector>

#include "divcert/objective.hpp"
#include "json.hpp"

namespace divcert {

/// f(x) = log sum_l c_l exp(<omega_l, x>)
class GeometricProgram final : public Objective {
 public:
  GeometricProgram(std::vector<double> c, std::vector<Vector> omega);

  std::size_t dim() const override { return dim_; }
  double smoothness() const override { return L_; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::pair<double, Vector> value_and_gradient(const Vector& x) const override;
  std::optional<double> conjugate_bound() const override { return M_; }
  std::optional<DualSetDescription> dual_set() const override { return Polytope{omega_}; }
  double shifted_value(const Vector& x, const Vector& p) const override;
  std::string name() const override { return "geometric"; }

  /// Softmax weights c_l e^{<omega_l,x>} / sum; they sum to 1.
  std::vector<double> weights(const Vector& x) const;

  const std::vector<double>& coefficients() const { return c_; }
  const std::vector<Vector>& exponents() const { return omega_; }

 private:
  std::vector<double> c_;
  std::vector<double> log_c_;
  std::vector<Vector> omega_;
  std::size_t dim_ = 0;
  double L_ = 0.0;
  double M_ = 0.0;
};

/// f(x) = sqrt(1 + <x, A x>) + <b, x>
class EllipsoidObjective final : public Objective {
 public:
  EllipsoidObjective(Matrix A, Vector b);

  std::size_t dim() const override { return b_.size(); }
  double smoothness() const override { return L_; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::pair<double, Vector> value_and_gradient(const Vector& x) const override;
  std::optional<double> conjugate_bound() const override { return 0.0; }
  std::optional<DualSetDescription> dual_set() const override { return EllipsoidSet{A_, b_}; }
  std::optional<double> conjugate(const Vector& p) const override;
  std::string name() const override { return "ellipsoid"; }

  const Matrix& matrix() const { return A_; }
  const Vector& offset() const { return b_; }

 private:
  Matrix A_;
  Vector b_;
  Cholesky chol_;
  double L_ = 0.0;
};

/// h(s) = (s+1)^{-alpha} - s - 1 for s >= 0 and -(1+alpha) s for s < 0,
/// applied to the first coordinate of x. The remaining coordinates (if any)
/// do not enter f.
class OneDimTight final : public Objective {
 public:
  explicit OneDimTight(double alpha, std::size_t dim = 1);

  std::size_t dim() const override { return dim_; }
  double smoothness() const override { return alpha_ * (alpha_ + 1.0); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  std::optional<double> conjugate_bound() const override { return 1.0; }
  std::optional<DualSetDescription> dual_set() const override;
  std::optional<double> conjugate(const Vector& p) const override;
  double shifted_value(const Vector& x, const Vector& p) const override;
  std::string name() const override { return "onedim_tight"; }

  double alpha() const { return alpha_; }
  static double h(double alpha, double s);
  static double dh(double alpha, double s);

 private:
  double alpha_;
  std::size_t dim_;
};

/// f(x) - <p, x>
class ShiftedObjective final : public Objective {
 public:
  ShiftedObjective(ObjectivePtr base, Vector p);

  std::size_t dim() const override { return base_->dim(); }
  double smoothness() const override { return base_->smoothness(); }
  double value(const Vector& x) const override { return base_->shifted_value(x, p_); }
  Vector gradient(const Vector& x) const override { return base_->gradient(x) - p_; }
  std::optional<double> conjugate_bound() const override { return base_->conjugate_bound(); }
  std::optional<DualSetDescription> dual_set() const override;
  std::optional<double> conjugate(const Vector& u) const override { return base_->conjugate(u + p_); }
  double shifted_value(const Vector& x, const Vector& q) const override { return base_->shifted_value(x, p_ + q); }
  std::string name() const override { return "shifted(" + base_->name() + ")"; }

  const Vector& shift() const { return p_; }
  const ObjectivePtr& base() const { return base_; }

 private:
  ObjectivePtr base_;
  Vector p_;
};

/// f(x) = <c, x>. Any positive smoothness constant is valid; 1 by default.
class LinearObjective final : public Objective {
 public:
  explicit LinearObjective(Vector c, double L = 1.0);

  std::size_t dim() const override { return c_.size(); }
  double smoothness() const override { return L_; }
  double value(const Vector& x) const override { return dot(c_, x); }
  Vector gradient(const Vector& x) const override {
    check_dim(x);
    return c_;
  }
  std::optional<double> conjugate_bound() const override { return 0.0; }
  std::optional<DualSetDescription> dual_set() const override { return Polytope{{c_}}; }
  std::optional<double> conjugate(const Vector& p) const override;
  double shifted_value(const Vector& x, const Vector& p) const override { return dot(c_ - p, x); }
  std::string name() const override { return "linear"; }

 private:
  Vector c_;
  double L_;
};

/// f(x) = |x|^2 / 2
class QuadraticObjective final : public Objective {
 public:
  explicit QuadraticObjective(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const override { return dim_; }
  double smoothness() const override { return 1.0; }
  double value(const Vector& x) const override { return 0.5 * norm_sq(x); }
  Vector gradient(const Vector& x) const override {
    check_dim(x);
    return x;
  }
  std::optional<double> conjugate(const Vector& p) const override { return 0.5 * norm_sq(p); }
  std::string name() const override { return "quadratic"; }

 private:
  std::size_t dim_;
};

/// Forwards everything to the base objective but reports a different
/// smoothness constant. Used to reproduce runs with a mis-specified L.
class DeclaredSmoothness final : public Objective {
 public:
  DeclaredSmoothness(ObjectivePtr base, double L);

  std::size_t dim() const override { return base_->dim(); }
  double smoothness() const override { return L_; }
  double value(const Vector& x) const override { return base_->value(x); }
  Vector gradient(const Vector& x) const override { return base_->gradient(x); }
  std::pair<double, Vector> value_and_gradient(const Vector& x) const override {
    return base_->value_and_gradient(x);
  }
  std::optional<double> conjugate_bound() const override { return base_->conjugate_bound(); }
  std::optional<DualSetDescription> dual_set() const override { return base_->dual_set(); }
  std::optional<double> conjugate(const Vector& p) const override { return base_->conjugate(p); }
  double shifted_value(const Vector& x, const Vector& p) const override { return base_->shifted_value(x, p); }
  std::string name() const override { return base_->name(); }

  const ObjectivePtr& base() const { return base_; }

 private:
  ObjectivePtr base_;
  double L_;
};

/// Builds an objective from a problem description. Errors are reported as
/// InvalidArgument with the offending field path, e.g. "problem.c[2]".
ObjectivePtr objective_from_json(const nlohmann::json& j, const std::string& path = "problem");

Vector vector_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace divcert
