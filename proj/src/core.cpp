#include "divcert/core.hpp"

#include <algorithm>
#include <cmath>

namespace divcert {

double bregman_divergence(const Objective& f, const Vector& x, const Vector& y) {
  f.check_dim(x);
  f.check_dim(y);
  const auto [fy, gy] = f.value_and_gradient(y);
  const double d = f.value(x) - fy - dot(gy, x - y);
  if (d < -kDivergenceClamp) {
    throw NegativeDivergence("Bregman divergence " + std::to_string(d) + " at x=" + to_string(x) +
                             ", y=" + to_string(y) + " is negative");
  }
  return std::max(d, 0.0);
}

double divergence_upper_bound(const Objective& f, const Vector& x0) {
  f.check_dim(x0);
  const auto m = f.conjugate_bound();
  if (!m) throw MissingConjugateBound(f.name() + " has no conjugate bound");
  const auto [f0, g0] = f.value_and_gradient(x0);
  return *m + f0 + norm(x0) * norm(g0);
}

SmoothConvexReport check_smooth_convex(const Objective& f, const std::vector<std::pair<Vector, Vector>>& samples,
                                       double tol) {
  if (samples.empty()) throw InvalidArgument("check_smooth_convex needs at least one pair");
  const double L = f.smoothness();
  SmoothConvexReport rep;
  double scale = 0.0;
  double worst = -1.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& [x, y] = samples[i];
    const auto [fx, gx] = f.value_and_gradient(x);
    const auto [fy, gy] = f.value_and_gradient(y);
    scale = std::max({scale, std::abs(fx), std::abs(fy)});
    const Vector d = y - x;
    const double lin = fx + dot(gx, d);
    const double conv = lin - fy;
    const double quad = fy - lin - 0.5 * L * norm_sq(d);
    const Vector dg = gx - gy;
    const double coco = norm_sq(dg) / L - dot(dg, x - y);
    rep.convexity = std::max(rep.convexity, conv);
    rep.upper_quadratic = std::max(rep.upper_quadratic, quad);
    rep.cocoercive = std::max(rep.cocoercive, coco);
    const double w = std::max({conv, quad, coco});
    if (w > worst) {
      worst = w;
      rep.worst_pair = i;
    }
  }
  const double limit = tol * (1.0 + scale);
  rep.pass = rep.convexity <= limit && rep.upper_quadratic <= limit && rep.cocoercive <= limit;
  return rep;
}

Vector finite_difference_grad(const Objective& f, const Vector& x, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite difference step must be positive");
  f.check_dim(x);
  Vector g(x.size());
  Vector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    probe[i] = xi + h;
    const double fp = f.value(probe);
    probe[i] = xi - h;
    const double fm = f.value(probe);
    probe[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace divcert
