#pragma once

#include <optional>
#include <vector>

#include "divcert/dualset.hpp"
#include "divcert/objective.hpp"

namespace divcert {

class GeometricProgram;

struct MinNormResult {
  Vector point;
  double norm = 0.0;
  /// Polytopes only: nonnegative weights over the input vertex list (same
  /// indexing, duplicates get weight 0) that reconstruct the point.
  std::optional<std::vector<double>> weights;
  /// Ellipsoids only: multiplier mu with p + mu A^{-1}(p - b) = 0.
  std::optional<double> multiplier;
  std::size_t iterations = 0;
};

/// Minimum-norm point of a polytope, an ellipsoid or an interval.
MinNormResult min_norm_point(const DualSetDescription& ds);

/// Wolfe's algorithm on conv(vertices).
MinNormResult min_norm_polytope(const std::vector<Vector>& vertices, std::size_t max_iter = 10000);

MinNormResult min_norm_ellipsoid(const EllipsoidSet& e);

/// Independent 2-D oracle: vertices, segments and origin-containing triangles
/// are all tried and the closest candidate kept (lowest index on ties).
MinNormResult min_norm_bruteforce_2d(const std::vector<Vector>& vertices);

/// Euclidean distance from p to the set.
double membership_gap(const DualSetDescription& ds, const Vector& p);

struct NewtonPolytopeStats {
  std::size_t m = 0;  // dimension of the affine hull
  double phi = 0.0;   // smallest point-to-facet-span distance, facets not containing the point
  double beta = 0.0;  // sum c / min c
};

NewtonPolytopeStats newton_polytope_stats(const GeometricProgram& gp);

/// Ingredients shared by every rate bound.
struct BoundsContext {
  double D = 0.0;  // divergence between x0 and the minimum-norm dual point
  Vector p_star;
  double grad_g_dot_pstar = 0.0;  // <grad f(x0) - p*, p*>
  double ct_offset = 0.0;         // grad_g_dot_pstar / (4 L D); 0 when D = 0
  bool D_is_exact = true;
};

BoundsContext make_bounds_context(const Objective& f, const Vector& x0, const Vector& p_star, double D,
                                  bool D_is_exact = true);

}  // namespace divcert
