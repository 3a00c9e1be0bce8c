#pragma once

#include <vector>

#include "rbffd/types.hpp"

namespace rbffd {

/// Piecewise-linear isotropic hardening curve sigma_y(epbar). The last slope
/// extrapolates beyond the final breakpoint. A single segment gives linear
/// hardening sigma_y0 + H*epbar; H = 0 gives perfect plasticity.
struct HardeningCurve {
  std::vector<double> ep;   // breakpoints, strictly increasing, ep[0] == 0
  std::vector<double> sy;   // yield stress at each breakpoint

  static HardeningCurve linear(double sigma_y0, double H) {
    return {{0.0, 1.0}, {sigma_y0, sigma_y0 + H}};
  }

  double sigma_y(double epbar) const {
    std::size_t i = segment(epbar);
    return sy[i] + slope_at(i) * (epbar - ep[i]);
  }

  double slope(double epbar) const { return slope_at(segment(epbar)); }

  void validate() const {
    if (ep.size() < 2 || ep.size() != sy.size() || ep[0] != 0.0)
      throw ConfigError("hardening curve needs increasing breakpoints starting at 0");
    for (std::size_t i = 1; i < ep.size(); ++i) {
      if (ep[i] <= ep[i - 1]) throw ConfigError("hardening breakpoints must increase");
      if (sy[i] < sy[i - 1]) throw ConfigError("yield stress must be nondecreasing");
    }
    if (!(sy[0] > 0.0)) throw ConfigError("initial yield stress must be positive");
  }

 private:
  std::size_t segment(double epbar) const {
    std::size_t i = 0;
    while (i + 2 < ep.size() && epbar >= ep[i + 1]) ++i;
    return i;
  }
  double slope_at(std::size_t i) const { return (sy[i + 1] - sy[i]) / (ep[i + 1] - ep[i]); }
};

struct MaterialModel {
  double E = 1.0;
  double nu = 0.3;
  HardeningCurve curve = HardeningCurve::linear(1e30, 0.0);
  PlaneMode mode = PlaneMode::plane_strain;

  double mu() const { return E / (2.0 * (1.0 + nu)); }
  double G() const { return mu(); }
  double lambda() const { return nu * E / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  double sigma_y0() const { return curve.sy[0]; }

  void validate(bool plastic = false) const {
    if (!(E > 0.0)) throw ConfigError("Young's modulus must be positive");
    if (!(nu > -1.0 && nu < 0.5)) throw ConfigError("Poisson ratio must be in (-1, 0.5)");
    curve.validate();
    if (plastic && mode == PlaneMode::plane_stress)
      throw ConfigError("plane-stress plasticity is not supported");
  }
};

struct TangentOperator {
  Mat4 D = Mat4::Zero();
  bool plastic = false;
};

/// Material point state in Voigt-4 (11, 22, 33, 12); strains carry the
/// engineering shear component.
struct MaterialState {
  Voigt4 sigma = Voigt4::Zero();
  Voigt4 eps = Voigt4::Zero();
  Voigt4 eps_e = Voigt4::Zero();
  Voigt4 eps_p = Voigt4::Zero();
  double ep_bar = 0.0;
};

inline Voigt4 deviator(const Voigt4& sigma) {
  double tr3 = (sigma(0) + sigma(1) + sigma(2)) / 3.0;
  return {sigma(0) - tr3, sigma(1) - tr3, sigma(2) - tr3, sigma(3)};
}

inline double j2_invariant(const Voigt4& s) {
  return 0.5 * (s(0) * s(0) + s(1) * s(1) + s(2) * s(2)) + s(3) * s(3);
}

inline double vm_stress(const Voigt4& sigma) {
  return std::sqrt(3.0 * j2_invariant(deviator(sigma)));
}

inline double yield_function(const Voigt4& sigma, double ep_bar, const MaterialModel& mat) {
  return vm_stress(sigma) - mat.curve.sigma_y(ep_bar);
}

/// Plane-strain or plane-stress elastic tensor in Voigt-4 with engineering
/// shear. Plane stress zeroes the 33 row/column and serves the elastic
/// benchmarks only.
inline TangentOperator elastic_tensor(const MaterialModel& mat) {
  if (mat.nu >= 0.5) throw ConfigError("incompressible limit nu = 0.5 not representable");
  TangentOperator t;
  if (mat.mode == PlaneMode::plane_strain) {
    const double mu = mat.mu(), lam = mat.lambda();
    t.D << 2 * mu + lam, lam, lam, 0,
           lam, 2 * mu + lam, lam, 0,
           lam, lam, 2 * mu + lam, 0,
           0, 0, 0, mu;
  } else {
    const double c = mat.E / (1.0 - mat.nu * mat.nu);
    t.D(0, 0) = t.D(1, 1) = c;
    t.D(0, 1) = t.D(1, 0) = mat.nu * c;
    t.D(3, 3) = mat.G();
  }
  return t;
}

/// CTO of the radial return: elastic branch returns D^e, the plastic branch
/// subtracts the deviatoric softening term and adds the flow-direction dyad.
inline TangentOperator consistent_tangent(const Voigt4& s_trial, double dgamma,
                                          const MaterialModel& mat, double hardening_slope) {
  if (dgamma < 0.0) throw InvalidInputError("plastic multiplier must be nonnegative");
  TangentOperator t = elastic_tensor(mat);
  if (dgamma == 0.0) return t;

  const double q_tr = std::sqrt(3.0 * j2_invariant(s_trial));
  if (q_tr == 0.0) throw MaterialError("degenerate flow direction in tangent", -1);
  const double G = mat.G();
  const double H = hardening_slope;

  // Deviatoric projector and unit flow dyad as maps on engineering strain.
  Mat4 i_dev;
  i_dev << 2.0 / 3, -1.0 / 3, -1.0 / 3, 0,
           -1.0 / 3, 2.0 / 3, -1.0 / 3, 0,
           -1.0 / 3, -1.0 / 3, 2.0 / 3, 0,
           0, 0, 0, 0.5;
  const double s_norm = std::sqrt(s_trial(0) * s_trial(0) + s_trial(1) * s_trial(1) +
                                  s_trial(2) * s_trial(2) + 2.0 * s_trial(3) * s_trial(3));
  Voigt4 n_bar = s_trial / s_norm;

  t.D += -(6.0 * G * G * dgamma / q_tr) * i_dev +
         6.0 * G * G * (dgamma / q_tr - 1.0 / (3.0 * G + H)) * (n_bar * n_bar.transpose());
  t.plastic = true;
  return t;
}

struct ReturnMapResult {
  MaterialState state;
  TangentOperator tangent;
  double dgamma = 0.0;
};

/// Elastic-predictor / plastic-corrector update for one strain increment.
/// `point` only labels error messages.
inline ReturnMapResult return_map(const MaterialState& s_n, const Voigt4& deps,
                                  const MaterialModel& mat, int point = -1) {
  ReturnMapResult out;
  const Mat4 De = elastic_tensor(mat).D;
  const Voigt4 sigma_tr = s_n.sigma + De * deps;

  if (yield_function(sigma_tr, s_n.ep_bar, mat) <= 0.0) {
    out.state.sigma = sigma_tr;
    out.state.eps = s_n.eps + deps;
    out.state.eps_p = s_n.eps_p;
    out.state.eps_e = s_n.eps_e + deps;
    out.state.ep_bar = s_n.ep_bar;
    out.tangent = elastic_tensor(mat);
    return out;
  }

  const Voigt4 s_tr = deviator(sigma_tr);
  const double q_tr = std::sqrt(3.0 * j2_invariant(s_tr));
  const double G = mat.G();

  // q_tr - 3 G dg - sigma_y(ep_bar_n + dg) = 0, Newton from dg = 0.
  double dg = 0.0;
  const double tol = 1e-12 * mat.sigma_y0() + 1e-14 * q_tr;  // scale-aware floor
  bool done = false;
  for (int it = 0; it < 50; ++it) {
    double res = q_tr - 3.0 * G * dg - mat.curve.sigma_y(s_n.ep_bar + dg);
    if (std::abs(res) <= tol) {
      done = true;
      break;
    }
    double dres = -3.0 * G - mat.curve.slope(s_n.ep_bar + dg);
    dg -= res / dres;
  }
  if (!done) throw MaterialError("return mapping did not converge", point);
  if (dg < 0.0) throw MaterialError("negative plastic multiplier", point);

  const double s_norm = std::sqrt(s_tr(0) * s_tr(0) + s_tr(1) * s_tr(1) + s_tr(2) * s_tr(2) +
                                  2.0 * s_tr(3) * s_tr(3));
  const double k = std::sqrt(1.5) / s_norm;
  Voigt4 flow{k * s_tr(0), k * s_tr(1), k * s_tr(2), k * s_tr(3)};          // tensor components
  Voigt4 flow_eng{flow(0), flow(1), flow(2), 2.0 * flow(3)};                 // engineering shear

  out.dgamma = dg;
  out.state.eps = s_n.eps + deps;
  out.state.eps_p = s_n.eps_p + dg * flow_eng;
  out.state.eps_e = out.state.eps - out.state.eps_p;
  // Accumulated as the integral of gamma-dot; coincides with
  // sqrt(2/3)*||eps_p|| on proportional paths and keeps the consistency
  // condition exact for nonlinear hardening.
  out.state.ep_bar = s_n.ep_bar + dg;
  out.state.sigma = sigma_tr - De * (dg * flow_eng);
  out.tangent = consistent_tangent(s_tr, dg, mat, mat.curve.slope(s_n.ep_bar + dg));
  return out;
}

}  // namespace rbffd
