#include "divcert/linalg.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

namespace divcert {

std::string to_string(const Vector& v) {
  std::string out = "(";
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    auto res = std::to_chars(buf, buf + sizeof(buf), v[i]);
    out.append(buf, res.ptr);
  }
  out += ")";
  return out;
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
  data_.reserve(n_ * n_);
  for (const auto& row : rows) {
    if (row.size() != n_) throw DimensionMismatch("matrix rows must form a square matrix");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vector& d) {
  Matrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Vector Matrix::operator*(const Vector& x) const {
  if (x.size() != n_) throw DimensionMismatch("matrix-vector dimension mismatch");
  Vector y(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Matrix Matrix::plus_identity(double mu) const {
  Matrix m = *this;
  for (std::size_t i = 0; i < n_; ++i) m(i, i) += mu;
  return m;
}

double Matrix::asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return worst;
}

Cholesky::Cholesky(const Matrix& a) : l_(a.size()) {
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
    if (!(d > 0.0)) throw InvalidArgument("matrix is not positive definite");
    l_(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
      l_(i, j) = s / l_(j, j);
    }
  }
}

Vector Cholesky::solve(const Vector& b) const {
  const std::size_t n = l_.size();
  if (b.size() != n) throw DimensionMismatch("Cholesky solve dimension mismatch");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * y[k];
    y[i] = s / l_(i, i);
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * x[k];
    x[ii] = s / l_(ii, ii);
  }
  return x;
}

double Cholesky::inverse_quadratic(const Vector& b) const { return dot(b, solve(b)); }

std::vector<double> symmetric_eigenvalues(const Matrix& input) {
  const std::size_t n = input.size();
  Matrix a = input;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double spectral_norm(const Matrix& a) {
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  // a deterministic, non-symmetric start avoids being orthogonal to the top
  // eigenvector for structured inputs
  for (std::size_t i = 0; i < n; ++i) v[i] += 1e-3 * static_cast<double>(i + 1);
  v /= norm(v);
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = a * v;
    const double wn = norm(w);
    if (wn == 0.0) return 0.0;
    const double next = dot(v, w);
    w /= wn;
    if (it > 0 && std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
      // accept only if v is a genuine eigenvector; otherwise fall through
      const Vector residual = a * w - w * next;
      if (norm(residual) <= 1e-9 * std::abs(next)) return next;
    }
    lambda = next;
    v = w;
  }
  const auto eig = symmetric_eigenvalues(a);
  return std::max(std::abs(eig.front()), std::abs(eig.back()));
}

std::vector<double> solve_dense(std::vector<std::vector<double>> m, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  double scale = 0.0;
  for (const auto& row : m)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) throw DegenerateInput("singular linear system");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    }
    if (std::abs(m[piv][col]) <= 1e-14 * scale) throw DegenerateInput("singular linear system");
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = rhs[ii];
    for (std::size_t c = ii + 1; c < n; ++c) s -= m[ii][c] * x[c];
    x[ii] = s / m[ii][ii];
  }
  return x;
}

}  // namespace divcert
