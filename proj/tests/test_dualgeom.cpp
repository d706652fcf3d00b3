#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "divcert/core.hpp"
#include "divcert/dualgeom.hpp"
#include "divcert/objectives.hpp"
#include "support.hpp"

using namespace divcert;
using namespace divcert::testing;

namespace {

// Hull-edge lines in 2-D by brute force: a pair spans a facet when all
// points lie on one side. Returns the smallest positive point-to-line
// distance over those lines.
double phi_reference_2d(const std::vector<Vector>& pts) {
  double best = INFINITY;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Vector d = pts[j] - pts[i];
      if (norm(d) == 0) continue;
      const Vector n{-d[1] / norm(d), d[0] / norm(d)};
      bool pos = false, neg = false;
      for (const auto& p : pts) {
        const double s = dot(n, p - pts[i]);
        if (s > 1e-12) pos = true;
        if (s < -1e-12) neg = true;
      }
      if (pos && neg) continue;
      for (const auto& p : pts) {
        const double s = std::abs(dot(n, p - pts[i]));
        if (s > 1e-12) best = std::min(best, s);
      }
    }
  }
  return best;
}

void expect_weights_reconstruct(const MinNormResult& r, const std::vector<Vector>& v) {
  ASSERT_TRUE(r.weights.has_value());
  const auto& w = *r.weights;
  ASSERT_EQ(w.size(), v.size());
  Vector p(v[0].size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_GE(w[i], 0.0);
    p += v[i] * w[i];
  }
  EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
  EXPECT_LE(norm(p - r.point), 1e-10);
}

}  // namespace

// ---- min_norm_point ----

TEST(MinNorm, PaperPolytope) {
  const auto r = min_norm_point(Polytope{paper_omega()});
  EXPECT_NEAR(r.point[0], 0.3, 1e-12);
  EXPECT_NEAR(r.point[1], 0.9, 1e-12);
  EXPECT_NEAR(r.norm, std::sqrt(0.9), 1e-12);
  expect_weights_reconstruct(r, paper_omega());
}

TEST(MinNorm, PaperEllipsoid) {
  const auto r = min_norm_point(EllipsoidSet{Matrix{{8, 0}, {0, 2}}, Vector{3, 3}});
  EXPECT_NEAR(r.point[0], 1.0, 1e-10);
  EXPECT_NEAR(r.point[1], 2.0, 1e-10);
  EXPECT_NEAR(r.norm, std::sqrt(5.0), 1e-10);
}

TEST(MinNorm, TightInterval) {
  const auto r = min_norm_point(Interval{-1.5, -1.0, 1});
  EXPECT_EQ(r.point[0], -1.0);
  EXPECT_EQ(min_norm_point(Interval{-1.0, 2.0, 2}).point, (Vector{0, 0}));
  EXPECT_EQ(min_norm_point(Interval{0.5, 2.0, 1}).point[0], 0.5);
}

TEST(MinNorm, SquareContainsOrigin) {
  const auto r = min_norm_point(Polytope{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}});
  EXPECT_LE(r.norm, 1e-12);
}

TEST(MinNorm, EllipsoidContainingOrigin) {
  const auto r = min_norm_point(EllipsoidSet{Matrix{{8, 0}, {0, 2}}, Vector{1, 0.5}});
  EXPECT_EQ(r.norm, 0.0);
}

TEST(MinNorm, SingleVertexAndDuplicates) {
  const auto r = min_norm_point(Polytope{{{2, -1}}});
  EXPECT_EQ(r.point, (Vector{2, -1}));
  const std::vector<Vector> dup{{3, 0}, {3, 0}, {0, 1}, {0, 1}, {1, 2}};
  const auto d = min_norm_point(Polytope{dup});
  EXPECT_NEAR(d.point[0], 0.3, 1e-12);
  EXPECT_NEAR(d.point[1], 0.9, 1e-12);
  expect_weights_reconstruct(d, dup);
}

TEST(MinNorm, EmptyPolytopeRejected) { EXPECT_THROW(min_norm_point(Polytope{}), InvalidArgument); }

// ---- brute force ----

TEST(BruteForce, PaperPolytopeOnSegment) {
  const auto r = min_norm_bruteforce_2d(paper_omega());
  EXPECT_NEAR(r.point[0], 0.3, 1e-12);
  EXPECT_NEAR(r.point[1], 0.9, 1e-12);
  // segment (3,0)-(0,1): 9(1-t)^2 + t^2 is minimal at t = 0.9
  const Vector seg = Vector{3, 0} * (1 - 0.9) + Vector{0, 1} * 0.9;
  EXPECT_LT(norm(seg - r.point), 1e-12);
}

TEST(BruteForce, TrivialCases) {
  EXPECT_EQ(min_norm_bruteforce_2d({{2, 5}}).point, (Vector{2, 5}));
  EXPECT_LE(min_norm_bruteforce_2d({{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}).norm, 1e-15);
  EXPECT_THROW(min_norm_bruteforce_2d({{1, 2, 3}}), DimensionMismatch);
}

TEST(BruteForce, MatchesTestReference) {
  Gen gen(30);
  for (int i = 0; i < 300; ++i) {
    const auto v = gen.points(gen.index(1, 8), 2, 5);
    EXPECT_LE(norm(min_norm_bruteforce_2d(v).point - min_norm_2d_reference(v)), 1e-12);
  }
}

// ---- properties ----

TEST(MinNormProperty, WolfeAgreesWithBruteForceOn500Polytopes) {
  Gen gen(31);
  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    const auto v = gen.points(gen.index(3, 10), 2, 5);
    const auto w = min_norm_point(Polytope{v});
    const auto b = min_norm_bruteforce_2d(v);
    worst = std::max(worst, norm(w.point - b.point));
    expect_weights_reconstruct(w, v);
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(MinNormProperty, WolfeAgreesWithReferenceOffOrigin) {
  // shift the clouds away from the origin so most cases are nontrivial
  Gen gen(32);
  for (int i = 0; i < 300; ++i) {
    auto v = gen.points(gen.index(2, 10), 2, 2);
    const Vector shift = gen.sphere(2) * gen.uniform(0.5, 6);
    for (auto& p : v) p += shift;
    EXPECT_LE(norm(min_norm_point(Polytope{v}).point - min_norm_2d_reference(v)), 1e-9);
  }
}

TEST(MinNormProperty, VariationalInequalityAtVertices) {
  // <v - p*, p*> >= 0 for every vertex, in 2-D and 3-D
  Gen gen(33);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = gen.index(2, 3);
    auto v = gen.points(gen.index(1, 12), n, 4);
    const Vector shift = gen.sphere(n) * gen.uniform(0, 6);
    for (auto& p : v) p += shift;
    const auto r = min_norm_point(Polytope{v});
    for (const auto& p : v) EXPECT_GE(dot(p - r.point, r.point), -1e-9);
    expect_weights_reconstruct(r, v);
  }
}

TEST(MinNormProperty, PythagoreanInequalityForMembers) {
  // |p - p*|^2 <= |p|^2 - |p*|^2 for members p
  Gen gen(34);
  const std::vector<DualSetDescription> sets{
      Polytope{paper_omega()},
      EllipsoidSet{Matrix{{8, 0}, {0, 2}}, Vector{3, 3}},
      Interval{-1.5, -1.0, 1},
      Polytope{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}},
  };
  auto ell = paper_ellipsoid();
  for (const auto& ds : sets) {
    const Vector ps = min_norm_point(ds).point;
    for (int i = 0; i < 200; ++i) {
      Vector p;
      if (const auto* poly = std::get_if<Polytope>(&ds)) {
        p = gen.in_hull(poly->vertices);
      } else if (std::holds_alternative<EllipsoidSet>(ds)) {
        p = ell->gradient(gen.box(2, 10));
      } else {
        p = Vector{gen.uniform(-1.5, -1.0)};
      }
      EXPECT_LE(norm_sq(p - ps), norm_sq(p) - norm_sq(ps) + 1e-9);
    }
  }
}

TEST(MinNormProperty, EllipsoidKKT) {
  Gen gen(35);
  int nontrivial = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = gen.index(1, 3);
    const Matrix A = gen.spd(n, 0.1, 10);
    const Vector b = gen.box(n, 5);
    const auto r = min_norm_point(EllipsoidSet{A, b});
    const Cholesky ch(A);
    EXPECT_LE(ch.inverse_quadratic(r.point - b), 1.0 + 1e-9);
    if (ch.inverse_quadratic(b) <= 1.0) {
      EXPECT_EQ(r.norm, 0.0);
      continue;
    }
    ++nontrivial;
    ASSERT_TRUE(r.multiplier.has_value());
    const Vector kkt = r.point + ch.solve(r.point - b) * *r.multiplier;
    EXPECT_LE(norm(kkt), 1e-9 * (1 + norm(b)));
    // the optimality of p* also follows from a sampled comparison
    for (int s = 0; s < 20; ++s) {
      const Vector u = gen.sphere(n);
      // boundary point b + A^{1/2}-scaled direction: b + t u with <tu, A^{-1} tu> = 1
      const double t = 1.0 / std::sqrt(ch.inverse_quadratic(u));
      EXPECT_GE(norm(b + u * t), r.norm - 1e-9);
    }
  }
  EXPECT_GT(nontrivial, 50);
}

// ---- membership_gap ----

TEST(Membership, PolytopeExamples) {
  const Polytope poly{paper_omega()};
  EXPECT_LE(membership_gap(poly, Vector{3, 0}), 1e-12);
  EXPECT_LE(membership_gap(poly, Vector{1.75, 1.5}), 1e-12);
  EXPECT_NEAR(membership_gap(poly, Vector{0, 0}), std::sqrt(0.9), 1e-12);
}

TEST(Membership, EllipsoidBoundaryOffset) {
  const EllipsoidSet ell{Matrix{{8, 0}, {0, 2}}, Vector{3, 3}};
  const double eps = 1e-3;
  // rightmost boundary point (3 + 2 sqrt 2, 3), offset along its normal e1
  EXPECT_NEAR(membership_gap(ell, Vector{3 + 2 * std::sqrt(2.0) + eps, 3}), eps, 1e-10);
  EXPECT_EQ(membership_gap(ell, Vector{3, 3}), 0.0);
  // the min-norm point is on the boundary; stepping toward the origin leaves the set
  const Vector ps{1, 2};
  EXPECT_NEAR(membership_gap(ell, ps - ps * (eps / norm(ps))), eps, 1e-10);
}

TEST(Membership, IntervalClosedForm) {
  const Interval iv{-1.5, -1.0, 2};
  EXPECT_EQ(membership_gap(iv, Vector{-1.2, 0}), 0.0);
  EXPECT_NEAR(membership_gap(iv, Vector{-0.5, 0}), 0.5, 1e-15);
  EXPECT_NEAR(membership_gap(iv, Vector{-2.0, 0}), 0.5, 1e-15);
  EXPECT_NEAR(membership_gap(iv, Vector{-1.2, 0.3}), 0.3, 1e-15);
}

TEST(Membership, ZeroInsideRandomHulls) {
  Gen gen(36);
  for (int i = 0; i < 100; ++i) {
    const auto v = gen.points(gen.index(1, 8), 2, 5);
    EXPECT_LE(membership_gap(Polytope{v}, gen.in_hull(v)), 1e-9);
    // distance to an outside point agrees with the 2-D reference
    const Vector p = gen.box(2, 10);
    std::vector<Vector> moved;
    for (const auto& u : v) moved.push_back(u - p);
    EXPECT_NEAR(membership_gap(Polytope{v}, p), norm(min_norm_2d_reference(moved)), 1e-9);
  }
}

// ---- Newton polytope statistics ----

TEST(NewtonStats, PaperInstance) {
  const auto st = newton_polytope_stats(*paper_geometric());
  EXPECT_EQ(st.m, 2u);
  EXPECT_DOUBLE_EQ(st.beta, 4.0);
  EXPECT_NEAR(st.phi, phi_reference_2d(paper_omega()), 1e-12);
}

TEST(NewtonStats, Segment) {
  GeometricProgram gp({1, 2}, {{0, 0}, {1, 0}});
  const auto st = newton_polytope_stats(gp);
  EXPECT_EQ(st.m, 1u);
  EXPECT_NEAR(st.phi, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(st.beta, 3.0);
}

TEST(NewtonStats, DuplicatesIgnored) {
  GeometricProgram with({1, 1, 1, 1, 1, 1}, {{3, 0}, {0, 1}, {1, 2}, {3, 3}, {3, 0}, {1, 2}});
  const auto st = newton_polytope_stats(with);
  EXPECT_EQ(st.m, 2u);
  EXPECT_NEAR(st.phi, phi_reference_2d(paper_omega()), 1e-12);
}

TEST(NewtonStats, RandomFullDimensionalAgainstReference) {
  Gen gen(37);
  for (int i = 0; i < 50; ++i) {
    auto gp = gen.geometric(2, gen.index(3, 7));
    const auto st = newton_polytope_stats(*gp);
    EXPECT_EQ(st.m, 2u);
    EXPECT_NEAR(st.phi, phi_reference_2d(gp->exponents()), 1e-9);
  }
}

TEST(NewtonStats, DegenerateRejected) {
  GeometricProgram gp({1, 1}, {{1, 1}, {1, 1}});
  EXPECT_THROW(newton_polytope_stats(gp), DegenerateInput);
}

// ---- bounds context ----

TEST(BoundsContextTest, RemarkConstant) {
  auto gp = paper_geometric();
  const Vector p_star{0.3, 0.9};
  const double D = std::log(4.0) - paper_geometric_inf_g();
  const auto ctx = make_bounds_context(*gp, Vector{0, 0}, p_star, D);
  const double num = dot(Vector{1.75, 1.5} - p_star, p_star);
  EXPECT_NEAR(ctx.grad_g_dot_pstar, num, 1e-15);
  EXPECT_NEAR(ctx.ct_offset, num / (4 * 18 * D), 1e-15);
  EXPECT_EQ(make_bounds_context(*gp, Vector{0, 0}, p_star, 0.0).ct_offset, 0.0);
  EXPECT_THROW(make_bounds_context(*gp, Vector{0, 0}, p_star, -1.0), InvalidArgument);
}
