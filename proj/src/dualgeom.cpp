#include "divcert/dualgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "divcert/objectives.hpp"

namespace divcert {

namespace {

struct Deduped {
  std::vector<Vector> points;
  std::vector<std::size_t> first_index;  // position in the caller's list
};

Deduped dedupe(const std::vector<Vector>& vs) {
  Deduped d;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    bool seen = false;
    for (const auto& p : d.points) {
      if (p == vs[i]) {
        seen = true;
        break;
      }
    }
    if (!seen) {
      d.points.push_back(vs[i]);
      d.first_index.push_back(i);
    }
  }
  return d;
}

void check_vertices(const std::vector<Vector>& vs) {
  if (vs.empty()) throw InvalidArgument("polytope needs at least one vertex");
  for (const auto& v : vs) {
    vs.front().check_same(v, "polytope vertices");
    if (!v.all_finite()) throw InvalidArgument("polytope vertices must be finite");
  }
}

Vector combine(const std::vector<Vector>& pts, const std::vector<std::size_t>& idx, const std::vector<double>& lam) {
  Vector x(pts.front().size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += lam[a] * pts[idx[a]][i];
  }
  return x;
}

// Coefficients (summing to 1) of the minimum-norm point of the affine hull.
std::vector<double> affine_minimizer(const std::vector<Vector>& pts, const std::vector<std::size_t>& idx) {
  const std::size_t s = idx.size();
  std::vector<std::vector<double>> m(s + 1, std::vector<double>(s + 1, 0.0));
  std::vector<double> rhs(s + 1, 0.0);
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t b = 0; b < s; ++b) m[a][b] = dot(pts[idx[a]], pts[idx[b]]);
    m[a][s] = 1.0;
    m[s][a] = 1.0;
  }
  rhs[s] = 1.0;
  auto sol = solve_dense(std::move(m), std::move(rhs));
  sol.pop_back();
  return sol;
}

}  // namespace

MinNormResult min_norm_polytope(const std::vector<Vector>& vertices, std::size_t max_iter) {
  check_vertices(vertices);
  const Deduped d = dedupe(vertices);
  const auto& pts = d.points;
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, norm_sq(p));
  const double tol = 1e-12 * scale;

  std::size_t start = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (norm_sq(pts[i]) < norm_sq(pts[start])) start = i;
  }
  std::vector<std::size_t> S{start};
  std::vector<double> lam{1.0};
  Vector x = pts[start];

  std::size_t iter = 0;
  for (;; ++iter) {
    if (iter >= max_iter) throw NonConvergence("Wolfe's algorithm hit the iteration cap");
    std::size_t j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double v = dot(x, pts[i]);
      if (v < best) {
        best = v;
        j = i;
      }
    }
    if (norm_sq(x) - best <= tol) break;
    if (std::find(S.begin(), S.end(), j) != S.end()) break;
    S.push_back(j);
    lam.push_back(0.0);

    bool stalled = false;
    for (std::size_t minor = 0;; ++minor) {
      if (minor > pts.size() + 2) throw NonConvergence("Wolfe's algorithm: minor cycle did not settle");
      std::vector<double> mu;
      try {
        mu = affine_minimizer(pts, S);
      } catch (const DegenerateInput&) {
        // the new vertex is affinely dependent on the corral up to rounding:
        // nothing more can be gained
        S.pop_back();
        lam.pop_back();
        stalled = true;
        break;
      }
      if (std::all_of(mu.begin(), mu.end(), [](double v) { return v > 0.0; })) {
        lam = mu;
        x = combine(pts, S, lam);
        break;
      }
      double theta = 1.0;
      std::size_t drop = 0;
      for (std::size_t a = 0; a < S.size(); ++a) {
        if (mu[a] <= 0.0) {
          const double t = lam[a] / (lam[a] - mu[a]);
          if (t < theta) {
            theta = t;
            drop = a;
          }
        }
      }
      for (std::size_t a = 0; a < S.size(); ++a) lam[a] = (1.0 - theta) * lam[a] + theta * mu[a];
      lam[drop] = 0.0;
      std::vector<std::size_t> S2;
      std::vector<double> lam2;
      double total = 0.0;
      for (std::size_t a = 0; a < S.size(); ++a) {
        if (lam[a] > 1e-15) {
          S2.push_back(S[a]);
          lam2.push_back(lam[a]);
          total += lam[a];
        }
      }
      for (double& v : lam2) v /= total;
      S = std::move(S2);
      lam = std::move(lam2);
      x = combine(pts, S, lam);
    }
    if (stalled) break;
  }

  MinNormResult res;
  res.point = x;
  res.norm = norm(x);
  std::vector<double> w(vertices.size(), 0.0);
  for (std::size_t a = 0; a < S.size(); ++a) w[d.first_index[S[a]]] = lam[a];
  res.weights = std::move(w);
  res.iterations = iter;
  return res;
}

MinNormResult min_norm_ellipsoid(const EllipsoidSet& e) {
  const std::size_t n = e.center.size();
  if (e.A.size() != n) throw DimensionMismatch("ellipsoid matrix and center disagree");
  const Cholesky chol(e.A);
  MinNormResult res;
  res.multiplier = 0.0;
  if (chol.inverse_quadratic(e.center) <= 1.0) {
    res.point = Vector(n);
    res.norm = 0.0;
    return res;
  }
  // With p(mu) = mu (A + mu I)^{-1} b we have p - b = -A (A + mu I)^{-1} b, so
  // the constraint value is |A^{1/2} (A + mu I)^{-1} b|^2, decreasing in mu.
  auto excess = [&](double mu) {
    const Vector u = Cholesky(e.A.plus_identity(mu)).solve(e.center);
    return dot(u, e.A * u) - 1.0;
  };
  double lo = 0.0;
  double hi = 1.0;
  std::size_t it = 0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++it > 200) throw NonConvergence("ellipsoid multiplier bracket did not close");
  }
  for (std::size_t k = 0; k < 200 && hi - lo > 1e-16 * hi; ++k, ++it) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mu = 0.5 * (lo + hi);
  res.point = Cholesky(e.A.plus_identity(mu)).solve(e.center) * mu;
  res.norm = norm(res.point);
  res.multiplier = mu;
  res.iterations = it;
  return res;
}

MinNormResult min_norm_point(const DualSetDescription& ds) {
  if (const auto* poly = std::get_if<Polytope>(&ds)) return min_norm_polytope(poly->vertices);
  if (const auto* ell = std::get_if<EllipsoidSet>(&ds)) return min_norm_ellipsoid(*ell);
  const auto& iv = std::get<Interval>(ds);
  if (iv.lo > iv.hi) throw InvalidArgument("interval has lo > hi");
  MinNormResult res;
  res.point = Vector(iv.dim);
  res.point[0] = std::clamp(0.0, iv.lo, iv.hi);
  res.norm = std::abs(res.point[0]);
  return res;
}

MinNormResult min_norm_bruteforce_2d(const std::vector<Vector>& vertices) {
  check_vertices(vertices);
  if (vertices.front().size() != 2) throw DimensionMismatch("brute-force oracle is two-dimensional");
  const std::size_t n = vertices.size();
  MinNormResult best;
  double best_sq = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& p, std::vector<double> w) {
    const double s = norm_sq(p);
    if (s < best_sq) {
      best_sq = s;
      best.point = p;
      best.weights = std::move(w);
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> w(n, 0.0);
    w[i] = 1.0;
    consider(vertices[i], std::move(w));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vector& a = vertices[i];
      const Vector& b = vertices[j];
      const Vector d = a - b;
      const double dd = norm_sq(d);
      if (dd == 0.0) continue;
      const double t = std::clamp(dot(a, d) / dd, 0.0, 1.0);
      std::vector<double> w(n, 0.0);
      w[i] = 1.0 - t;
      w[j] = t;
      consider(a * (1.0 - t) + b * t, std::move(w));
    }
  }
  // the origin itself, when some triangle contains it
  if (best_sq > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          const Vector& a = vertices[i];
          const Vector& b = vertices[j];
          const Vector& c = vertices[k];
          const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
          if (std::abs(det) < 1e-300) continue;
          // barycentric coordinates of 0
          const double l1 = ((-a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (-a[1])) / det;
          const double l2 = ((b[0] - a[0]) * (-a[1]) - (-a[0]) * (b[1] - a[1])) / det;
          const double l0 = 1.0 - l1 - l2;
          if (l0 >= 0.0 && l1 >= 0.0 && l2 >= 0.0) {
            std::vector<double> w(n, 0.0);
            w[i] = l0;
            w[j] = l1;
            w[k] = l2;
            consider(Vector(2), std::move(w));
          }
        }
      }
    }
  }
  best.norm = std::sqrt(best_sq);
  return best;
}

double membership_gap(const DualSetDescription& ds, const Vector& p) {
  if (const auto* poly = std::get_if<Polytope>(&ds)) {
    check_vertices(poly->vertices);
    std::vector<Vector> shifted;
    shifted.reserve(poly->vertices.size());
    for (const auto& v : poly->vertices) shifted.push_back(v - p);
    return min_norm_polytope(shifted).norm;
  }
  if (const auto* ell = std::get_if<EllipsoidSet>(&ds)) {
    return min_norm_ellipsoid(EllipsoidSet{ell->A, ell->center - p}).norm;
  }
  const auto& iv = std::get<Interval>(ds);
  if (p.size() != iv.dim) throw DimensionMismatch("interval dimension mismatch");
  double sq = 0.0;
  if (p[0] < iv.lo) sq += (iv.lo - p[0]) * (iv.lo - p[0]);
  if (p[0] > iv.hi) sq += (p[0] - iv.hi) * (p[0] - iv.hi);
  for (std::size_t i = 1; i < p.size(); ++i) sq += p[i] * p[i];
  return std::sqrt(sq);
}

namespace {

// Orthonormal basis of span{v - origin} by modified Gram-Schmidt.
std::vector<Vector> affine_basis(const std::vector<Vector>& pts, double tol) {
  std::vector<Vector> basis;
  for (const auto& p : pts) {
    Vector v = p - pts.front();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : basis) v -= e * dot(e, v);
    }
    const double nv = norm(v);
    if (nv > tol) basis.push_back(v / nv);
  }
  return basis;
}

}  // namespace

NewtonPolytopeStats newton_polytope_stats(const GeometricProgram& gp) {
  if (gp.dim() > 3) throw InvalidArgument("Newton polytope statistics need ambient dimension <= 3");
  const Deduped d = dedupe(gp.exponents());
  double scale = 1.0;
  for (const auto& p : d.points) scale = std::max(scale, norm(p));
  const double tol = 1e-9 * scale;
  const auto basis = affine_basis(d.points, tol);
  NewtonPolytopeStats st;
  st.m = basis.size();
  double csum = 0.0;
  double cmin = std::numeric_limits<double>::infinity();
  for (double c : gp.coefficients()) {
    csum += c;
    cmin = std::min(cmin, c);
  }
  st.beta = csum / cmin;
  if (st.m == 0) throw DegenerateInput("all exponent vectors coincide");

  // coordinates in the affine hull
  std::vector<std::vector<double>> y;
  for (const auto& p : d.points) {
    std::vector<double> c(st.m);
    const Vector v = p - d.points.front();
    for (std::size_t k = 0; k < st.m; ++k) c[k] = dot(basis[k], v);
    y.push_back(std::move(c));
  }
  const std::size_t n = y.size();
  double phi = std::numeric_limits<double>::infinity();

  // A candidate hyperplane {u : <normal, u> = offset} with unit normal is a
  // facet span when every point lies on one side of it.
  auto try_plane = [&](const std::vector<double>& normal, double offset) {
    double lo = 0.0, hi = 0.0;
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = -offset;
      for (std::size_t k = 0; k < st.m; ++k) s += normal[k] * y[i][k];
      dist[i] = s;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    if (lo < -tol && hi > tol) return;
    for (double s : dist) {
      if (std::abs(s) > tol) phi = std::min(phi, std::abs(s));
    }
  };

  if (st.m == 1) {
    for (std::size_t i = 0; i < n; ++i) try_plane({1.0}, y[i][0]);
  } else if (st.m == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y[j][0] - y[i][0];
        const double dy = y[j][1] - y[i][1];
        const double len = std::hypot(dx, dy);
        if (len <= tol) continue;
        const std::vector<double> nrm{-dy / len, dx / len};
        try_plane(nrm, nrm[0] * y[i][0] + nrm[1] * y[i][1]);
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          const double a[3] = {y[j][0] - y[i][0], y[j][1] - y[i][1], y[j][2] - y[i][2]};
          const double b[3] = {y[k][0] - y[i][0], y[k][1] - y[i][1], y[k][2] - y[i][2]};
          std::vector<double> nrm{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
          const double len = std::sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]);
          if (len <= tol * tol) continue;
          for (double& v : nrm) v /= len;
          try_plane(nrm, nrm[0] * y[i][0] + nrm[1] * y[i][1] + nrm[2] * y[i][2]);
        }
      }
    }
  }
  if (!std::isfinite(phi)) throw DegenerateInput("no facet with an off-facet point");
  st.phi = phi;
  return st;
}

BoundsContext make_bounds_context(const Objective& f, const Vector& x0, const Vector& p_star, double D,
                                  bool D_is_exact) {
  if (!(D >= 0.0)) throw InvalidArgument("divergence must be nonnegative");
  BoundsContext ctx;
  ctx.D = D;
  ctx.p_star = p_star;
  ctx.D_is_exact = D_is_exact;
  ctx.grad_g_dot_pstar = dot(f.gradient(x0) - p_star, p_star);
  ctx.ct_offset = D > 0.0 ? ctx.grad_g_dot_pstar / (4.0 * f.smoothness() * D) : 0.0;
  return ctx;
}

}  // namespace divcert
