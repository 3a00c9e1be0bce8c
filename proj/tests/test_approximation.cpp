#include <gtest/gtest.h>

#include <random>

#include "rbffd/approximation.hpp"
#include "rbffd/benchmarks.hpp"
#include "rbffd/node_cloud.hpp"

namespace rbffd {
namespace {

NodeCloud relaxed_cloud(double h, unsigned long long seed) {
  AnnulusParams pr;
  DomainSpec d = annulus_case(pr).domain;
  d.density = [h](const Vec2&) { return uniform_density(h); };
  d.finalize();
  return generate_nodes(d, seed);
}

double monomial(const Vec2& x, int i, int j) { return std::pow(x.x(), i) * std::pow(x.y(), j); }

double monomial_deriv(const Vec2& x, int i, int j, int di, int dj) {
  double v = 1.0;
  int ii = i, jj = j;
  for (int k = 0; k < di; ++k) v *= ii--;
  for (int k = 0; k < dj; ++k) v *= jj--;
  if (ii < 0 || jj < 0) return 0.0;
  return v * std::pow(x.x(), ii) * std::pow(x.y(), jj);
}

// Acceptance criterion: operator weights reproduce all monomials of degree <= p
// under d/dx, d/dy and the Laplacian at random evaluation points.
TEST(Stencil, PolynomialReproduction) {
  std::mt19937_64 rng(11);
  for (int p : {2, 3, 4}) {
    NodeCloud cloud = relaxed_cloud(0.08, 5);
    CellGrid grid(cloud.pos, cloud.min_h());
    AugmentationBasis basis = AugmentationBasis::make(p);
    ApproachConfig cfg;
    cfg.p = p;
    std::uniform_int_distribution<int> pick(0, cloud.size() - 1);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    for (int trial = 0; trial < 8; ++trial) {
      const int l = pick(rng);
      SupportDomain sup = build_support(cloud, grid, l, cfg.support_size());
      Stencil st(cloud, sup, basis, 3);
      Vec2 xe = cloud.pos[l] + cloud.h[l] * Vec2(jitter(rng), jitter(rng));
      ShapeWeights w = st.shape_weights(xe);
      for (int deg = 0; deg <= p; ++deg) {
        for (int i = 0; i <= deg; ++i) {
          const int j = deg - i;
          double fid = 0, fdx = 0, fdy = 0, flap = 0;
          for (std::size_t k = 0; k < sup.nodes.size(); ++k) {
            double f = monomial(cloud.pos[sup.nodes[k]], i, j);
            fid += w.id(k) * f;
            fdx += w.dx(k) * f;
            fdy += w.dy(k) * f;
            flap += (w.dxx(k) + w.dyy(k)) * f;
          }
          const double scale = std::max(1.0, std::abs(monomial(xe, i, j)));
          EXPECT_NEAR(fid, monomial(xe, i, j), 1e-9 * scale) << "p=" << p << " x^" << i << "y^" << j;
          EXPECT_NEAR(fdx, monomial_deriv(xe, i, j, 1, 0), 1e-9 * std::max(1.0, std::abs(fdx)));
          EXPECT_NEAR(fdy, monomial_deriv(xe, i, j, 0, 1), 1e-9 * std::max(1.0, std::abs(fdy)));
          double lap = monomial_deriv(xe, i, j, 2, 0) + monomial_deriv(xe, i, j, 0, 2);
          EXPECT_NEAR(flap, lap, 1e-8 * std::max(1.0, std::abs(lap)));
        }
      }
    }
  }
}

TEST(Stencil, ShapeWeightsMatchSingleOperatorSolves) {
  NodeCloud cloud = relaxed_cloud(0.08, 9);
  CellGrid grid(cloud.pos, cloud.min_h());
  AugmentationBasis basis = AugmentationBasis::make(2);
  ApproachConfig cfg;
  SupportDomain sup = build_support(cloud, grid, 10, cfg.support_size());
  Stencil st(cloud, sup, basis, 3);
  Vec2 xe = cloud.pos[10] + Vec2(0.01, -0.02);
  ShapeWeights w = st.shape_weights(xe);
  EXPECT_LT((w.id - st.weights(DiffOp::identity(), xe)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((w.dx - st.weights(DiffOp::ddx(), xe)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((w.dy - st.weights(DiffOp::ddy(), xe)).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::VectorXd lap = st.weights(DiffOp::laplacian(), xe);
  EXPECT_LT((w.dxx + w.dyy - lap).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Stencil, SingularOnDegenerateCloud) {
  // All support nodes on one line cannot determine y-derivatives.
  NodeCloud cloud;
  for (int i = 0; i < 13; ++i)
    cloud.push({0.1 * i, 0.0}, NodeKind::inner, Vec2::Zero(), BcTag::none, 0.1);
  CellGrid grid(cloud.pos, cloud.min_h());
  AugmentationBasis basis = AugmentationBasis::make(2);
  SupportDomain sup = build_support(cloud, grid, 0, 13);
  EXPECT_THROW((Stencil(cloud, sup, basis, 3)), SingularStencilError);
}

TEST(Stencil, DuplicateNodesAreSingular) {
  NodeCloud cloud = relaxed_cloud(0.1, 4);
  // Duplicate node 0 on top of node 1.
  cloud.pos[1] = cloud.pos[0];
  CellGrid grid(cloud.pos, cloud.min_h());
  AugmentationBasis basis = AugmentationBasis::make(2);
  SupportDomain sup = build_support(cloud, grid, 0, 13);
  EXPECT_THROW((Stencil(cloud, sup, basis, 3)), SingularStencilError);
}

TEST(Phs, ValueAndValidation) {
  EXPECT_DOUBLE_EQ(phs_value(0.0, 1.0, 3), 0.0);
  EXPECT_DOUBLE_EQ(phs_value(2.0, 1.0, 3), 8.0);
  EXPECT_DOUBLE_EQ(phs_value(1.0, 2.0, 3), 0.125);
  EXPECT_THROW(phs_value(1.0, 0.0, 3), InvalidInputError);
  EXPECT_THROW(phs_value(-1.0, 1.0, 3), InvalidInputError);
}

TEST(AugmentationBasis, GradedSizes) {
  for (int p : {1, 2, 3, 4})
    EXPECT_EQ(AugmentationBasis::make(p).size(), (p + 1) * (p + 2) / 2);
}

TEST(Support, SelfFirstAndSize) {
  NodeCloud cloud = relaxed_cloud(0.08, 6);
  CellGrid grid(cloud.pos, cloud.min_h());
  for (int l : {0, 5, cloud.size() - 1}) {
    SupportDomain sup = build_support(cloud, grid, l, 13);
    ASSERT_EQ(sup.nodes.size(), 13u);
    EXPECT_EQ(sup.nodes[0], l);
    EXPECT_GT(sup.lh, 0.0);
    // All support nodes are among the nearest ones: max distance below 4 h.
    for (int j : sup.nodes) EXPECT_LT((cloud.pos[j] - cloud.pos[l]).norm(), 4.0 * cloud.h[l]);
  }
}

TEST(CellGrid, KNearestMatchesBruteForce) {
  NodeCloud cloud = relaxed_cloud(0.1, 8);
  CellGrid grid(cloud.pos, cloud.min_h());
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, cloud.size() - 1);
  for (int t = 0; t < 10; ++t) {
    Vec2 q = cloud.pos[pick(rng)] + Vec2(0.01, 0.013);
    auto got = grid.k_nearest(q, 9);
    std::vector<int> idx(cloud.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      double da = (cloud.pos[a] - q).squaredNorm(), db = (cloud.pos[b] - q).squaredNorm();
      return da != db ? da < db : a < b;
    });
    ASSERT_EQ(got.size(), 9u);
    for (int k = 0; k < 9; ++k) EXPECT_EQ(got[k], idx[k]) << "neighbor rank " << k;
  }
}

}  // namespace
}  // namespace rbffd
