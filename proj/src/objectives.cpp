#include "divcert/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace divcert {

std::size_t dual_set_dim(const DualSetDescription& ds) {
  if (const auto* poly = std::get_if<Polytope>(&ds)) {
    return poly->vertices.empty() ? 0 : poly->vertices.front().size();
  }
  if (const auto* ell = std::get_if<EllipsoidSet>(&ds)) return ell->center.size();
  return std::get<Interval>(ds).dim;
}

// ---------------------------------------------------------------------------
// geometric program

GeometricProgram::GeometricProgram(std::vector<double> c, std::vector<Vector> omega)
    : c_(std::move(c)), omega_(std::move(omega)) {
  if (c_.empty()) throw InvalidArgument("geometric program needs at least one term");
  if (c_.size() != omega_.size()) {
    throw DimensionMismatch("geometric program has " + std::to_string(c_.size()) + " coefficients but " +
                            std::to_string(omega_.size()) + " exponent vectors");
  }
  dim_ = omega_.front().size();
  if (dim_ == 0) throw InvalidArgument("exponent vectors must be nonempty");
  double cmin = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < c_.size(); ++l) {
    if (!(c_[l] > 0.0) || !std::isfinite(c_[l])) throw InvalidArgument("coefficients must be positive and finite");
    if (omega_[l].size() != dim_) throw DimensionMismatch("exponent vectors must share one dimension");
    if (!omega_[l].all_finite()) throw InvalidArgument("exponent vectors must be finite");
    log_c_.push_back(std::log(c_[l]));
    L_ = std::max(L_, norm_sq(omega_[l]));
    cmin = std::min(cmin, c_[l]);
  }
  M_ = -std::log(cmin);
  // a single zero exponent makes f constant; keep L positive so step sizes exist
  if (L_ == 0.0) L_ = 1.0;
}

namespace {

// log sum_l exp(s_l), max-shifted; also fills the normalized weights
double log_sum_exp(const std::vector<double>& s, std::vector<double>* w) {
  const double m = *std::max_element(s.begin(), s.end());
  double total = 0.0;
  if (w) w->resize(s.size());
  for (std::size_t l = 0; l < s.size(); ++l) {
    const double e = std::exp(s[l] - m);
    total += e;
    if (w) (*w)[l] = e;
  }
  if (w) {
    for (double& v : *w) v /= total;
  }
  return m + std::log(total);
}

}  // namespace

double GeometricProgram::value(const Vector& x) const {
  check_dim(x);
  std::vector<double> s(c_.size());
  for (std::size_t l = 0; l < c_.size(); ++l) s[l] = log_c_[l] + dot(omega_[l], x);
  return log_sum_exp(s, nullptr);
}

std::vector<double> GeometricProgram::weights(const Vector& x) const {
  check_dim(x);
  std::vector<double> s(c_.size());
  for (std::size_t l = 0; l < c_.size(); ++l) s[l] = log_c_[l] + dot(omega_[l], x);
  std::vector<double> w;
  log_sum_exp(s, &w);
  return w;
}

std::pair<double, Vector> GeometricProgram::value_and_gradient(const Vector& x) const {
  check_dim(x);
  std::vector<double> s(c_.size());
  for (std::size_t l = 0; l < c_.size(); ++l) s[l] = log_c_[l] + dot(omega_[l], x);
  std::vector<double> w;
  const double f = log_sum_exp(s, &w);
  Vector g(dim_);
  for (std::size_t l = 0; l < c_.size(); ++l) {
    for (std::size_t i = 0; i < dim_; ++i) g[i] += w[l] * omega_[l][i];
  }
  return {f, g};
}

Vector GeometricProgram::gradient(const Vector& x) const { return value_and_gradient(x).second; }

double GeometricProgram::shifted_value(const Vector& x, const Vector& p) const {
  check_dim(x);
  check_dim(p);
  std::vector<double> s(c_.size());
  for (std::size_t l = 0; l < c_.size(); ++l) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) acc += (omega_[l][i] - p[i]) * x[i];
    s[l] = log_c_[l] + acc;
  }
  return log_sum_exp(s, nullptr);
}

// ---------------------------------------------------------------------------
// ellipsoid

namespace {

Matrix validated_spd(Matrix A, std::size_t n) {
  if (A.size() != n) throw DimensionMismatch("A must be " + std::to_string(n) + "x" + std::to_string(n));
  if (A.asymmetry() > 1e-12) throw InvalidArgument("A must be symmetric");
  return A;
}

}  // namespace

EllipsoidObjective::EllipsoidObjective(Matrix A, Vector b)
    : A_(validated_spd(std::move(A), b.size())), b_(std::move(b)), chol_(A_), L_(spectral_norm(A_)) {
  if (b_.empty()) throw InvalidArgument("ellipsoid objective needs a nonempty b");
}

double EllipsoidObjective::value(const Vector& x) const {
  check_dim(x);
  return std::sqrt(1.0 + dot(x, A_ * x)) + dot(b_, x);
}

std::pair<double, Vector> EllipsoidObjective::value_and_gradient(const Vector& x) const {
  check_dim(x);
  const Vector ax = A_ * x;
  const double r = std::sqrt(1.0 + dot(x, ax));
  return {r + dot(b_, x), ax / r + b_};
}

Vector EllipsoidObjective::gradient(const Vector& x) const { return value_and_gradient(x).second; }

std::optional<double> EllipsoidObjective::conjugate(const Vector& p) const {
  check_dim(p);
  const Vector u = p - b_;
  const double s = chol_.inverse_quadratic(u);
  if (s > 1.0 + 1e-12) return std::nullopt;
  return -std::sqrt(std::max(0.0, 1.0 - s));
}

// ---------------------------------------------------------------------------
// one-dimensional tight example

OneDimTight::OneDimTight(double alpha, std::size_t dim) : alpha_(alpha), dim_(dim) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive");
  if (dim == 0) throw InvalidArgument("dimension must be positive");
}

double OneDimTight::h(double alpha, double s) {
  if (s >= 0.0) return std::pow(s + 1.0, -alpha) - s - 1.0;
  return -(1.0 + alpha) * s;
}

double OneDimTight::dh(double alpha, double s) {
  if (s >= 0.0) return -alpha * std::pow(s + 1.0, -alpha - 1.0) - 1.0;
  return -(1.0 + alpha);
}

double OneDimTight::value(const Vector& x) const {
  check_dim(x);
  return h(alpha_, x[0]);
}

Vector OneDimTight::gradient(const Vector& x) const {
  check_dim(x);
  Vector g(dim_);
  g[0] = dh(alpha_, x[0]);
  return g;
}

std::optional<DualSetDescription> OneDimTight::dual_set() const { return Interval{-(1.0 + alpha_), -1.0, dim_}; }

std::optional<double> OneDimTight::conjugate(const Vector& p) const {
  check_dim(p);
  for (std::size_t i = 1; i < dim_; ++i) {
    if (p[i] != 0.0) return std::nullopt;
  }
  const double p1 = p[0];
  const double lo = -(1.0 + alpha_);
  if (p1 < lo || p1 > -1.0) return std::nullopt;
  if (p1 == -1.0) return 1.0;
  // stationary point of p1 s - h(s) on s >= 0
  const double u = std::pow(-(1.0 + p1) / alpha_, -1.0 / (alpha_ + 1.0));  // s + 1
  const double s = std::max(0.0, u - 1.0);
  return (1.0 + p1) * s + 1.0 - std::pow(s + 1.0, -alpha_);
}

double OneDimTight::shifted_value(const Vector& x, const Vector& p) const {
  check_dim(x);
  check_dim(p);
  double rest = 0.0;
  for (std::size_t i = 1; i < dim_; ++i) rest += p[i] * x[i];
  const double s = x[0];
  if (s >= 0.0) return std::pow(s + 1.0, -alpha_) - 1.0 - (1.0 + p[0]) * s - rest;
  return -(1.0 + alpha_ + p[0]) * s - rest;
}

// ---------------------------------------------------------------------------
// wrappers

ShiftedObjective::ShiftedObjective(ObjectivePtr base, Vector p) : base_(std::move(base)), p_(std::move(p)) {
  if (!base_) throw InvalidArgument("shifted objective needs a base");
  base_->check_dim(p_);
}

std::optional<DualSetDescription> ShiftedObjective::dual_set() const {
  auto ds = base_->dual_set();
  if (!ds) return std::nullopt;
  if (auto* poly = std::get_if<Polytope>(&*ds)) {
    for (auto& v : poly->vertices) v -= p_;
    return ds;
  }
  if (auto* ell = std::get_if<EllipsoidSet>(&*ds)) {
    ell->center -= p_;
    return ds;
  }
  auto& iv = std::get<Interval>(*ds);
  for (std::size_t i = 1; i < p_.size(); ++i) {
    // a shifted segment leaves the first axis; describe it as a polytope
    if (p_[i] != 0.0) {
      Vector a(p_.size()), b(p_.size());
      a[0] = iv.lo;
      b[0] = iv.hi;
      return Polytope{{a - p_, b - p_}};
    }
  }
  iv.lo -= p_[0];
  iv.hi -= p_[0];
  return ds;
}

LinearObjective::LinearObjective(Vector c, double L) : c_(std::move(c)), L_(L) {
  if (c_.empty()) throw InvalidArgument("linear objective needs a nonempty c");
  if (!(L > 0.0)) throw InvalidArgument("smoothness constant must be positive");
}

std::optional<double> LinearObjective::conjugate(const Vector& p) const {
  check_dim(p);
  if (p == c_) return 0.0;
  return std::nullopt;
}

DeclaredSmoothness::DeclaredSmoothness(ObjectivePtr base, double L) : base_(std::move(base)), L_(L) {
  if (!base_) throw InvalidArgument("declared smoothness needs a base");
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("smoothness constant must be positive");
}

// ---------------------------------------------------------------------------
// JSON

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw InvalidArgument(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InvalidArgument(path + "." + key + ": missing");
  return *it;
}

double number_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) throw InvalidArgument(path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InvalidArgument(path + ": must be finite");
  return v;
}

Matrix matrix_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw InvalidArgument(path + ": expected a nonempty array of rows");
  const std::size_t n = j.size();
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != n) throw InvalidArgument(rp + ": expected " + std::to_string(n) + " entries");
    for (std::size_t k = 0; k < n; ++k) m(i, k) = number_from_json(j[i][k], rp + "[" + std::to_string(k) + "]");
  }
  return m;
}

}  // namespace

Vector vector_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw InvalidArgument(path + ": expected a nonempty array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = number_from_json(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

ObjectivePtr objective_from_json(const nlohmann::json& j, const std::string& path) {
  const auto& type_j = field(j, "type", path);
  if (!type_j.is_string()) throw InvalidArgument(path + ".type: expected a string");
  const std::string type = type_j.get<std::string>();
  ObjectivePtr out;
  try {
    if (type == "geometric") {
      const auto& cj = field(j, "c", path);
      const auto& oj = field(j, "omega", path);
      const Vector c = vector_from_json(cj, path + ".c");
      if (!oj.is_array()) throw InvalidArgument(path + ".omega: expected an array of vectors");
      std::vector<Vector> omega;
      for (std::size_t l = 0; l < oj.size(); ++l) {
        omega.push_back(vector_from_json(oj[l], path + ".omega[" + std::to_string(l) + "]"));
      }
      for (std::size_t l = 0; l < c.size(); ++l) {
        if (!(c[l] > 0.0)) throw InvalidArgument(path + ".c[" + std::to_string(l) + "]: must be positive");
      }
      out = std::make_shared<GeometricProgram>(c.std_vector(), std::move(omega));
    } else if (type == "ellipsoid") {
      out = std::make_shared<EllipsoidObjective>(matrix_from_json(field(j, "A", path), path + ".A"),
                                                 vector_from_json(field(j, "b", path), path + ".b"));
    } else if (type == "onedim_tight") {
      const double alpha = number_from_json(field(j, "alpha", path), path + ".alpha");
      std::size_t dim = 1;
      if (j.contains("dim")) {
        if (!j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() == 0) {
          throw InvalidArgument(path + ".dim: expected a positive integer");
        }
        dim = j["dim"].get<std::size_t>();
      }
      out = std::make_shared<OneDimTight>(alpha, dim);
    } else if (type == "shifted") {
      auto base = objective_from_json(field(j, "base", path), path + ".base");
      out = std::make_shared<ShiftedObjective>(std::move(base), vector_from_json(field(j, "p", path), path + ".p"));
    } else if (type == "linear") {
      double L = 1.0;
      if (j.contains("L_linear")) L = number_from_json(j["L_linear"], path + ".L_linear");
      out = std::make_shared<LinearObjective>(vector_from_json(field(j, "c", path), path + ".c"), L);
    } else if (type == "quadratic") {
      const auto& dj = field(j, "dim", path);
      if (!dj.is_number_unsigned() || dj.get<std::size_t>() == 0) {
        throw InvalidArgument(path + ".dim: expected a positive integer");
      }
      out = std::make_shared<QuadraticObjective>(dj.get<std::size_t>());
    } else {
      throw InvalidArgument(path + ".type: unknown problem type '" + type + "'");
    }
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw InvalidArgument(path + ": " + msg);
  } catch (const DimensionMismatch& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
  if (j.contains("L")) {
    out = std::make_shared<DeclaredSmoothness>(std::move(out), number_from_json(j["L"], path + ".L"));
  }
  return out;
}

}  // namespace divcert
