#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "divcert/errors.hpp"

namespace divcert {

/// Dense real vector of fixed dimension. Binary operations require equal
/// dimensions and throw DimensionMismatch otherwise.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  static Vector unit(std::size_t n, std::size_t i) {
    Vector e(n);
    e[i] = 1.0;
    return e;
  }

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<const double> values() const { return data_; }
  const std::vector<double>& std_vector() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  bool all_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  Vector& operator+=(const Vector& o) {
    check_same(o, "+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    check_same(o, "-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Vector& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }
  Vector& operator/=(double s) {
    for (double& v : data_) v /= s;
    return *this;
  }

  bool operator==(const Vector& o) const = default;

  void check_same(const Vector& o, const char* what) const {
    if (o.size() != size()) {
      throw DimensionMismatch(std::string("vector dimension mismatch in ") + what + ": " +
                              std::to_string(size()) + " vs " + std::to_string(o.size()));
    }
  }

 private:
  std::vector<double> data_;
};

inline Vector operator+(Vector a, const Vector& b) { return a += b; }
inline Vector operator-(Vector a, const Vector& b) { return a -= b; }
inline Vector operator*(Vector a, double s) { return a *= s; }
inline Vector operator*(double s, Vector a) { return a *= s; }
inline Vector operator/(Vector a, double s) { return a /= s; }
inline Vector operator-(Vector a) { return a *= -1.0; }

inline double dot(const Vector& a, const Vector& b) {
  a.check_same(b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(const Vector& a) { return dot(a, a); }
inline double norm(const Vector& a) { return std::sqrt(norm_sq(a)); }
inline double distance(const Vector& a, const Vector& b) { return norm(a - b); }

/// x - step * d, evaluated coordinate-wise as x[i] - step * d[i]. Gradient
/// descent and its mirror-descent reformulation both go through this helper
/// so that their iterates are bitwise identical.
inline Vector step_along(const Vector& x, double step, const Vector& d) {
  x.check_same(d, "step_along");
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - step * d[i];
  return out;
}

std::string to_string(const Vector& v);

/// Dense square matrix, row-major. Only what the ellipsoid family needs.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& d);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  Vector operator*(const Vector& x) const;
  Matrix plus_identity(double mu) const;

  /// max |A_ij - A_ji|
  double asymmetry() const;

  bool operator==(const Matrix& o) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Cholesky factor of a symmetric positive-definite matrix. Construction
/// throws InvalidArgument when a pivot is not positive.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& a);
  Vector solve(const Vector& b) const;
  /// <b, A^{-1} b>
  double inverse_quadratic(const Vector& b) const;

 private:
  Matrix l_;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(const Matrix& a);

/// Largest eigenvalue of a symmetric positive semidefinite matrix. Power
/// iteration to relative 1e-12; falls back to Jacobi when the iteration
/// stalls (clustered top eigenvalues).
double spectral_norm(const Matrix& a);

/// Solve a small dense square system by Gaussian elimination with partial
/// pivoting. Throws DegenerateInput if the matrix is numerically singular.
std::vector<double> solve_dense(std::vector<std::vector<double>> m, std::vector<double> rhs);

}  // namespace divcert
