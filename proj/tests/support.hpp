#pragma once

// Test-side oracles written without the library's numerics: long double
// evaluation, brute-force geometry and closed forms. Generators are seeded
// so failures reproduce.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "divcert/linalg.hpp"
#include "divcert/objectives.hpp"

namespace divcert::testing {

using LD = long double;

inline std::vector<Vector> paper_omega() { return {{3.0, 0.0}, {0.0, 1.0}, {1.0, 2.0}, {3.0, 3.0}}; }

inline std::shared_ptr<const GeometricProgram> paper_geometric() {
  return std::make_shared<GeometricProgram>(std::vector<double>{1, 1, 1, 1}, paper_omega());
}

inline std::shared_ptr<const EllipsoidObjective> paper_ellipsoid() {
  return std::make_shared<EllipsoidObjective>(Matrix{{8, 0}, {0, 2}}, Vector{3, 3});
}

inline std::shared_ptr<const GeometricProgram> square_geometric() {
  return std::make_shared<GeometricProgram>(std::vector<double>{1, 1, 1, 1},
                                            std::vector<Vector>{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
}

// inf of f - <(0.3,0.9), x> for the paper's geometric instance
inline double paper_geometric_inf_g() { return std::log(std::pow(3.0, 0.2) + std::pow(3.0, -1.8)); }

// ---- long double oracles ----

inline LD lse_ld(const std::vector<double>& c, const std::vector<Vector>& omega, const Vector& x) {
  std::vector<LD> e(c.size());
  LD mx = -INFINITY;
  for (std::size_t l = 0; l < c.size(); ++l) {
    LD s = std::log(static_cast<LD>(c[l]));
    for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<LD>(omega[l][i]) * x[i];
    e[l] = s;
    mx = std::max(mx, s);
  }
  LD sum = 0;
  for (LD v : e) sum += std::exp(v - mx);
  return mx + std::log(sum);
}

inline std::vector<LD> lse_grad_ld(const std::vector<double>& c, const std::vector<Vector>& omega, const Vector& x) {
  const LD f = lse_ld(c, omega, x);
  std::vector<LD> g(x.size(), 0);
  for (std::size_t l = 0; l < c.size(); ++l) {
    LD s = std::log(static_cast<LD>(c[l]));
    for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<LD>(omega[l][i]) * x[i];
    const LD w = std::exp(s - f);
    for (std::size_t i = 0; i < x.size(); ++i) g[i] += w * omega[l][i];
  }
  return g;
}

inline LD ellipsoid_ld(const Matrix& A, const Vector& b, const Vector& x) {
  LD q = 0, lin = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lin += static_cast<LD>(b[i]) * x[i];
    for (std::size_t j = 0; j < x.size(); ++j) q += static_cast<LD>(x[i]) * A(i, j) * x[j];
  }
  return std::sqrt(1 + q) + lin;
}

// Closest point of segment [a, b] to the origin, long double.
inline Vector segment_min_norm_ld(const Vector& a, const Vector& b) {
  LD num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const LD d = static_cast<LD>(b[i]) - a[i];
    num -= static_cast<LD>(a[i]) * d;
    den += d * d;
  }
  LD t = den > 0 ? num / den : 0;
  t = std::clamp<LD>(t, 0, 1);
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = static_cast<double>(a[i] + t * (static_cast<LD>(b[i]) - a[i]));
  return out;
}

// Does the triangle (a, b, c) contain the origin (closed)?
inline bool triangle_contains_origin(const Vector& a, const Vector& b, const Vector& c) {
  auto cross = [](const Vector& u, const Vector& v) { return static_cast<LD>(u[0]) * v[1] - static_cast<LD>(u[1]) * v[0]; };
  const LD d1 = cross(a, b), d2 = cross(b, c), d3 = cross(c, a);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

// Min-norm point of a 2-D point set: origin if some triangle holds it,
// otherwise the best over all segments and vertices.
inline Vector min_norm_2d_reference(const std::vector<Vector>& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      for (std::size_t k = j + 1; k < v.size(); ++k)
        if (triangle_contains_origin(v[i], v[j], v[k])) return Vector(2);
  Vector best = v[0];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (norm_sq(v[i]) < norm_sq(best)) best = v[i];
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const Vector s = segment_min_norm_ld(v[i], v[j]);
      if (norm_sq(s) < norm_sq(best)) best = s;
    }
  }
  return best;
}

// ---- generators ----

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }

  Vector box(std::size_t n, double r) {
    Vector v(n);
    for (auto& e : v) e = uniform(-r, r);
    return v;
  }

  Vector sphere(std::size_t n) {
    Vector v(n);
    std::normal_distribution<double> nd;
    do {
      for (auto& e : v) e = nd(rng_);
    } while (norm(v) == 0.0);
    return v / norm(v);
  }

  std::vector<Vector> points(std::size_t count, std::size_t n, double r) {
    std::vector<Vector> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(box(n, r));
    return out;
  }

  // convex combination of the given vertices with random weights
  Vector in_hull(const std::vector<Vector>& v) {
    std::vector<double> w(v.size());
    double s = 0;
    for (auto& e : w) s += (e = -std::log(uniform(1e-12, 1.0)));
    Vector p(v[0].size());
    for (std::size_t i = 0; i < v.size(); ++i) p += v[i] * (w[i] / s);
    return p;
  }

  // random geometric program in R^n with n_terms exponents
  std::shared_ptr<const GeometricProgram> geometric(std::size_t n, std::size_t n_terms) {
    std::vector<double> c;
    for (std::size_t i = 0; i < n_terms; ++i) c.push_back(uniform(0.2, 3.0));
    return std::make_shared<GeometricProgram>(c, points(n_terms, n, 3.0));
  }

  // random SPD matrix in R^{n x n} with eigenvalues in [lo, hi]
  Matrix spd(std::size_t n, double lo, double hi) {
    // A = Q diag Q^T with Q from Gram-Schmidt
    std::vector<Vector> q;
    while (q.size() < n) {
      Vector v = sphere(n);
      for (const auto& u : q) v -= u * dot(u, v);
      if (norm(v) < 1e-3) continue;
      q.push_back(v / norm(v));
    }
    Matrix A(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double lam = uniform(lo, hi);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A(i, j) += lam * q[k][i] * q[k][j];
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) A(i, j) = A(j, i);
    return A;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace divcert::testing
