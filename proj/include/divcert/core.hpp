#pragma once

#include <utility>
#include <vector>

#include "divcert/objective.hpp"

namespace divcert {

/// Values in [-kDivergenceClamp, 0) are treated as rounding and clamped to 0.
inline constexpr double kDivergenceClamp = 1e-12;

/// f(x) - f(y) - <grad f(y), x - y>, i.e. the dual divergence at p = grad f(y).
double bregman_divergence(const Objective& f, const Vector& x, const Vector& y);

/// M + f(x0) + |x0| |grad f(x0)|; an upper bound on the divergence between x0
/// and the minimum-norm dual point.
double divergence_upper_bound(const Objective& f, const Vector& x0);

struct SmoothConvexReport {
  double convexity = 0.0;      // max of f(x) + <g(x), y-x> - f(y)
  double upper_quadratic = 0.0;  // max of f(y) - f(x) - <g(x), y-x> - L/2 |y-x|^2
  double cocoercive = 0.0;     // max of |g(x)-g(y)|^2/L - <g(x)-g(y), x-y>
  std::size_t worst_pair = 0;
  bool pass = true;
};

/// Every violation is divided by 1 + max |f| over the sample before comparing
/// with the 1e-9 threshold.
SmoothConvexReport check_smooth_convex(const Objective& f, const std::vector<std::pair<Vector, Vector>>& samples,
                                       double tol = 1e-9);

Vector finite_difference_grad(const Objective& f, const Vector& x, double h = 1e-5);

}  // namespace divcert
