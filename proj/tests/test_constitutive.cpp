#include <gtest/gtest.h>

#include <random>

#include "rbffd/constitutive.hpp"

namespace rbffd {
namespace {

MaterialModel make_material(double sigma_y0, double H) {
  MaterialModel m;
  m.E = 1.0;
  m.nu = 0.25;
  m.curve = HardeningCurve::linear(sigma_y0, H);
  m.mode = PlaneMode::plane_strain;
  return m;
}

TEST(Material, ElasticConstants) {
  MaterialModel m = make_material(1.0, 0.0);
  EXPECT_DOUBLE_EQ(m.mu(), 0.4);
  EXPECT_DOUBLE_EQ(m.lambda(), 0.4);
  EXPECT_THROW(make_material(-1.0, 0.0).validate(), ConfigError);
  MaterialModel bad = make_material(1.0, 0.0);
  bad.nu = 0.6;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = make_material(1.0, 0.0);
  bad.mode = PlaneMode::plane_stress;
  EXPECT_NO_THROW(bad.validate(false));
  EXPECT_THROW(bad.validate(true), ConfigError);
}

TEST(Hardening, LinearAndPiecewise) {
  HardeningCurve lin = HardeningCurve::linear(20.0, 5.0);
  EXPECT_DOUBLE_EQ(lin.sigma_y(0.0), 20.0);
  EXPECT_DOUBLE_EQ(lin.sigma_y(0.3), 21.5);
  EXPECT_DOUBLE_EQ(lin.slope(10.0), 5.0);  // last slope extrapolates

  HardeningCurve pw{{0.0, 0.01, 0.02}, {2.0, 2.5, 2.5}};
  pw.validate();
  EXPECT_DOUBLE_EQ(pw.sigma_y(0.005), 2.25);
  EXPECT_DOUBLE_EQ(pw.sigma_y(0.05), 2.5);
  EXPECT_DOUBLE_EQ(pw.slope(0.015), 0.0);

  HardeningCurve bad{{0.0, 0.01}, {2.0, 1.0}};
  EXPECT_THROW(bad.validate(), ConfigError);
  HardeningCurve bad2{{0.01, 0.02}, {2.0, 2.5}};
  EXPECT_THROW(bad2.validate(), ConfigError);
}

TEST(Invariants, VonMisesKnownValues) {
  // Uniaxial stress: vm equals |sigma_11|.
  Voigt4 uni{3.0, 0.0, 0.0, 0.0};
  EXPECT_NEAR(vm_stress(uni), 3.0, 1e-14);
  // Pure shear: vm = sqrt(3) * tau.
  Voigt4 shear{0.0, 0.0, 0.0, 2.0};
  EXPECT_NEAR(vm_stress(shear), 2.0 * std::sqrt(3.0), 1e-14);
  // Hydrostatic stress has no deviator.
  Voigt4 hyd{5.0, 5.0, 5.0, 0.0};
  EXPECT_NEAR(vm_stress(hyd), 0.0, 1e-14);
  EXPECT_NEAR(deviator(hyd).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(ElasticTensor, PlaneStrainAndPlaneStress) {
  MaterialModel m = make_material(1.0, 0.0);
  Mat4 D = elastic_tensor(m).D;
  // Plane strain: uniaxial strain produces lambda in the transverse entries.
  Voigt4 e{1.0, 0.0, 0.0, 0.0};
  Voigt4 s = D * e;
  EXPECT_NEAR(s(0), 2 * m.mu() + m.lambda(), 1e-14);
  EXPECT_NEAR(s(1), m.lambda(), 1e-14);
  EXPECT_NEAR(s(2), m.lambda(), 1e-14);
  // Engineering shear maps through mu.
  Voigt4 g{0.0, 0.0, 0.0, 1.0};
  EXPECT_NEAR((D * g)(3), m.mu(), 1e-14);

  m.mode = PlaneMode::plane_stress;
  Mat4 Dps = elastic_tensor(m).D;
  EXPECT_NEAR(Dps(0, 0), m.E / (1 - m.nu * m.nu), 1e-14);
  EXPECT_DOUBLE_EQ(Dps(2, 2), 0.0);
}

// Independent closed-form oracle for linear hardening:
// dgamma = (q_tr - sigma_y(ep_bar_n)) / (3G + H).
TEST(ReturnMap, MatchesClosedFormLinearHardening) {
  for (double H : {0.0, 0.13}) {
    MaterialModel m = make_material(0.002, H);
    MaterialState s0;
    s0.ep_bar = 0.01;
    Voigt4 deps{0.004, -0.001, 0.0, 0.003};

    const Mat4 De = elastic_tensor(m).D;
    Voigt4 sigma_tr = s0.sigma + De * deps;
    double q_tr = vm_stress(sigma_tr);
    ASSERT_GT(q_tr, m.curve.sigma_y(s0.ep_bar));  // plastic step by construction
    double dg_exact = (q_tr - m.curve.sigma_y(s0.ep_bar)) / (3.0 * m.G() + H);

    auto rm = return_map(s0, deps, m);
    EXPECT_NEAR(rm.dgamma, dg_exact, 1e-12 * dg_exact);
    EXPECT_NEAR(rm.state.ep_bar, s0.ep_bar + dg_exact, 1e-14);
    // Updated stress sits on the yield surface.
    EXPECT_NEAR(vm_stress(rm.state.sigma), m.curve.sigma_y(rm.state.ep_bar),
                1e-10 * m.sigma_y0());
    // Radial return scales the trial deviator; mean stress is untouched.
    Voigt4 s_tr = deviator(sigma_tr), s_new = deviator(rm.state.sigma);
    double scale = 1.0 - 3.0 * m.G() * dg_exact / q_tr;
    EXPECT_LT((s_new - scale * s_tr).cwiseAbs().maxCoeff(), 1e-12);
    double p_tr = (sigma_tr(0) + sigma_tr(1) + sigma_tr(2)) / 3.0;
    double p_new = (rm.state.sigma(0) + rm.state.sigma(1) + rm.state.sigma(2)) / 3.0;
    EXPECT_NEAR(p_new, p_tr, 1e-14);
  }
}

TEST(ReturnMap, ElasticBranchReturnsTrialState) {
  MaterialModel m = make_material(100.0, 0.0);
  MaterialState s0;
  Voigt4 deps{0.004, -0.001, 0.0, 0.003};
  auto rm = return_map(s0, deps, m);
  EXPECT_FALSE(rm.tangent.plastic);
  EXPECT_DOUBLE_EQ(rm.dgamma, 0.0);
  EXPECT_LT((rm.state.sigma - elastic_tensor(m).D * deps).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((rm.tangent.D - elastic_tensor(m).D).cwiseAbs().maxCoeff(), 0.0 + 1e-14);
}

Mat4 fd_tangent(const MaterialState& s0, const Voigt4& deps, const MaterialModel& m,
                double step) {
  Mat4 D;
  for (int j = 0; j < 4; ++j) {
    Voigt4 ep = deps, em = deps;
    ep(j) += step;
    em(j) -= step;
    D.col(j) = (return_map(s0, ep, m).state.sigma - return_map(s0, em, m).state.sigma) /
               (2.0 * step);
  }
  return D;
}

// Acceptance criterion: consistent tangent matches a central finite difference
// of the stress update to 1e-5 relative, for elastic, perfectly plastic and
// hardening branches, at several FD steps.
TEST(ConsistentTangent, MatchesFiniteDifference) {
  struct Case {
    double sigma_y0, H;
    Voigt4 deps;
  };
  std::vector<Case> cases = {
      {100.0, 0.0, Voigt4{0.004, -0.001, 0.0, 0.003}},   // stays elastic
      {0.002, 0.0, Voigt4{0.004, -0.001, 0.0, 0.003}},   // perfect plasticity
      {0.002, 0.13, Voigt4{0.004, -0.001, 0.0, 0.003}},  // linear hardening
      {0.002, 0.13, Voigt4{-0.002, 0.005, 0.0, -0.001}},
  };
  for (const auto& c : cases) {
    MaterialModel m = make_material(c.sigma_y0, c.H);
    MaterialState s0;
    s0.sigma = Voigt4{0.0005, -0.0002, 0.0001, 0.0003};
    s0.eps_e = s0.eps = Voigt4{0.001, -0.0005, 0.0, 0.001};
    auto rm = return_map(s0, c.deps, m);
    double scale = rm.tangent.D.cwiseAbs().maxCoeff();
    for (double step : {1e-6, 1e-7, 1e-8}) {
      Mat4 Dfd = fd_tangent(s0, c.deps, m, step);
      EXPECT_LT((Dfd - rm.tangent.D).cwiseAbs().maxCoeff() / scale, 1e-5)
          << "sy0=" << c.sigma_y0 << " H=" << c.H << " step=" << step;
    }
  }
}

// Acceptance criterion: 1e4 random return-map calls preserve the Kuhn-Tucker
// conditions and the structural invariants of J2 plasticity.
TEST(ReturnMap, KuhnTuckerPropertySuite) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> eps(-0.006, 0.006);
  std::uniform_real_distribution<double> hard(0.0, 0.3);
  MaterialState state;  // walk a single material point through random steps
  MaterialModel m = make_material(0.003, 0.0);
  int plastic_calls = 0;
  for (int call = 0; call < 10000; ++call) {
    if (call % 200 == 0) {  // restart the walk with fresh hardening now and then
      state = MaterialState{};
      m = make_material(0.003, hard(rng));
    }
    Voigt4 deps{eps(rng), eps(rng), 0.0, eps(rng)};
    auto rm = return_map(state, deps, m);

    const double sy = m.curve.sigma_y(rm.state.ep_bar);
    // f <= 0: updated stress never leaves the yield surface.
    ASSERT_LE(vm_stress(rm.state.sigma), sy * (1.0 + 1e-9)) << "call " << call;
    // dgamma >= 0 and complementarity dgamma * f = 0.
    ASSERT_GE(rm.dgamma, 0.0);
    if (rm.dgamma > 0.0) {
      ASSERT_NEAR(vm_stress(rm.state.sigma), sy, 1e-9 * sy) << "call " << call;
      ++plastic_calls;
    } else {
      ASSERT_LT((rm.state.sigma - (state.sigma + elastic_tensor(m).D * deps))
                    .cwiseAbs()
                    .maxCoeff(),
                1e-15 + 1e-12 * sy);
    }
    // ep_bar never decreases; plastic strain is deviatoric (isochoric flow).
    ASSERT_GE(rm.state.ep_bar, state.ep_bar);
    ASSERT_NEAR(rm.state.eps_p(0) + rm.state.eps_p(1) + rm.state.eps_p(2), 0.0, 1e-12);
    // Additive split stays exact and the tangent stays symmetric.
    ASSERT_LT((rm.state.eps - rm.state.eps_e - rm.state.eps_p).cwiseAbs().maxCoeff(), 1e-14);
    ASSERT_LT((rm.tangent.D - rm.tangent.D.transpose()).cwiseAbs().maxCoeff(),
              1e-10 * rm.tangent.D.cwiseAbs().maxCoeff());
    state = rm.state;
  }
  EXPECT_GT(plastic_calls, 1000);  // the walk genuinely exercises the plastic branch
}

TEST(ConsistentTangent, RejectsNegativeMultiplier) {
  MaterialModel m = make_material(1.0, 0.0);
  Voigt4 s{1.0, 0.0, -1.0, 0.0};
  EXPECT_THROW(consistent_tangent(s, -0.1, m, 0.0), InvalidInputError);
}

}  // namespace
}  // namespace rbffd
