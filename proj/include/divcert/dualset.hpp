#pragma once

#include <variant>
#include <vector>

#include "divcert/linalg.hpp"

namespace divcert {

/// Convex hull of a finite vertex list.
struct Polytope {
  std::vector<Vector> vertices;
};

/// {p : <p - center, A^{-1}(p - center)> <= 1}
struct EllipsoidSet {
  Matrix A;
  Vector center;
};

/// [lo, hi] on the first coordinate; any further coordinates are pinned to 0.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t dim = 1;
};

using DualSetDescription = std::variant<Polytope, EllipsoidSet, Interval>;

std::size_t dual_set_dim(const DualSetDescription& ds);

}  // namespace divcert
