#include <gtest/gtest.h>

#include <numbers>

#include "rbffd/benchmarks.hpp"
#include "rbffd/node_cloud.hpp"

namespace rbffd {
namespace {

DomainSpec quarter_annulus(double h) {
  AnnulusParams pr;
  DomainSpec d = annulus_case(pr).domain;
  d.density = [h](const Vec2&) { return uniform_density(h); };
  d.finalize();
  return d;
}

TEST(DomainSpec, ContainsQuarterAnnulus) {
  DomainSpec d = quarter_annulus(0.05);
  EXPECT_TRUE(d.contains({1.5, 0.2}));
  EXPECT_TRUE(d.contains({0.2, 1.5}));
  EXPECT_FALSE(d.contains({0.5, 0.5}));   // inside the hole
  EXPECT_FALSE(d.contains({2.1, 0.1}));   // beyond the outer radius
  EXPECT_FALSE(d.contains({1.5, -0.1}));  // below the axis
}

TEST(DomainSpec, BoundaryDistance) {
  DomainSpec d = quarter_annulus(0.05);
  EXPECT_NEAR(d.boundary_distance({1.5, 1e-12}), 0.0, 1e-6);
  EXPECT_NEAR(d.boundary_distance({1.5 * std::cos(0.7), 1.5 * std::sin(0.7)}), 0.5, 1e-4);
  EXPECT_TRUE(d.contains_with_tolerance({1.5, -1e-10}, 1e-8));
  EXPECT_FALSE(d.contains_with_tolerance({1.5, -1e-3}, 1e-8));
}

TEST(ArcLengthTable, QuarterArcLength) {
  BoundarySegment arc = seg::arc(2.0, 0.0, std::numbers::pi / 2.0, 1.0, BcTag::traction);
  ArcLengthTable t(arc);
  EXPECT_NEAR(t.length(), std::numbers::pi, 1e-6);
  // param_at the half length lands at 45 degrees
  double tm = t.param_at(t.length() / 2.0);
  EXPECT_NEAR(tm, std::numbers::pi / 4.0, 1e-4);
}

TEST(BoundaryNodes, MidpointPlacementNoCorners) {
  DomainSpec d = quarter_annulus(0.05);
  NodeCloud cloud = place_boundary_nodes(d);
  ASSERT_GT(cloud.size(), 0);
  // No node sits on a corner of the domain.
  const Vec2 corners[] = {{1, 0}, {2, 0}, {0, 1}, {0, 2}};
  for (int l = 0; l < cloud.size(); ++l) {
    for (const Vec2& c : corners)
      EXPECT_GT((cloud.pos[l] - c).norm(), 0.4 * cloud.h[l])
          << "node " << l << " too close to a corner";
    EXPECT_EQ(cloud.kind[l], NodeKind::boundary);
    EXPECT_NEAR(cloud.normal[l].norm(), 1.0, 1e-9);
    // Node lies on the boundary polyline.
    EXPECT_LT(d.boundary_distance(cloud.pos[l]), 1e-4);
  }
  // Consecutive nodes along the bottom edge are one spacing apart.
  std::vector<double> xs;
  for (int l = 0; l < cloud.size(); ++l)
    if (std::abs(cloud.pos[l].y()) < 1e-9) xs.push_back(cloud.pos[l].x());
  std::sort(xs.begin(), xs.end());
  ASSERT_GE(xs.size(), 2u);
  for (std::size_t i = 1; i < xs.size(); ++i)
    EXPECT_NEAR(xs[i] - xs[i - 1], xs[1] - xs[0], 1e-9);
}

TEST(BoundaryNodes, InnerBoundaryOffsetOneSpacing) {
  DomainSpec d = quarter_annulus(0.05);
  NodeCloud cloud = place_boundary_nodes(d);
  const int nb = cloud.size();
  place_inner_boundary_nodes(cloud, d);
  ASSERT_GT(cloud.size(), nb);
  for (int l = nb; l < cloud.size(); ++l) {
    EXPECT_EQ(cloud.kind[l], NodeKind::inner_boundary);
    EXPECT_TRUE(d.contains(cloud.pos[l]));
  }
  // Inner-boundary nodes of the inner arc sit at radius Ri + h.
  for (int l = nb; l < cloud.size(); ++l) {
    double r = cloud.pos[l].norm();
    if (r < 1.5 && cloud.pos[l].x() > 0.1 && cloud.pos[l].y() > 0.1)
      EXPECT_NEAR(r, 1.0 + cloud.h[l], 0.2 * cloud.h[l]);
  }
}

TEST(NodeGeneration, CountMatchesDensity) {
  const double h = 0.033;
  DomainSpec d = quarter_annulus(h);
  NodeCloud cloud = generate_nodes(d, 3);
  const double area = std::numbers::pi / 4.0 * (4.0 - 1.0);
  const double expected = uniform_density(h) * area;
  EXPECT_NEAR(cloud.size(), expected, 0.10 * expected);
  EXPECT_GT(cloud.n_inner(), 0);
  EXPECT_GT(cloud.n_boundary(), 0);
}

TEST(NodeGeneration, MinimumSeparationAndContainment) {
  const double h = 0.05;
  DomainSpec d = quarter_annulus(h);
  NodeCloud cloud = generate_nodes(d, 7);
  for (int l = 0; l < cloud.size(); ++l)
    EXPECT_TRUE(d.contains_with_tolerance(cloud.pos[l], 1e-6));
  // No node pair closer than a conservative fraction of the spacing.
  double dmin = 1e30;
  for (int a = 0; a < cloud.size(); ++a)
    for (int b = a + 1; b < cloud.size(); ++b)
      dmin = std::min(dmin, (cloud.pos[a] - cloud.pos[b]).norm());
  EXPECT_GT(dmin, 0.3 * h);
}

TEST(NodeGeneration, DeterministicForFixedSeed) {
  const double h = 0.05;
  DomainSpec d = quarter_annulus(h);
  NodeCloud a = generate_nodes(d, 42);
  NodeCloud b = generate_nodes(d, 42);
  ASSERT_EQ(a.size(), b.size());
  for (int l = 0; l < a.size(); ++l) {
    EXPECT_EQ(a.pos[l].x(), b.pos[l].x());
    EXPECT_EQ(a.pos[l].y(), b.pos[l].y());
    EXPECT_EQ(a.kind[l], b.kind[l]);
  }
  NodeCloud c = generate_nodes(d, 43);
  bool identical = c.size() == a.size();
  if (identical)
    for (int l = 0; l < a.size(); ++l)
      if (a.pos[l] != c.pos[l]) {
        identical = false;
        break;
      }
  EXPECT_FALSE(identical) << "different seeds should give different interiors";
}

TEST(NodeGeneration, SpacingFromDensityRoundTrip) {
  for (double h : {0.1, 0.05, 0.01})
    EXPECT_NEAR(spacing_from_density(uniform_density(h)), h, 1e-12);
  EXPECT_THROW(spacing_from_density(0.0), InvalidInputError);
  EXPECT_THROW(uniform_density(-1.0), InvalidInputError);
}

}  // namespace
}  // namespace rbffd
