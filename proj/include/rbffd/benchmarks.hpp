#pragma once

#include <Eigen/SVD>
#include <map>
#include <numbers>

#include "rbffd/solver.hpp"

namespace rbffd {

/// Prescribed boundary value at a boundary point: u-bar for Dirichlet rows,
/// T-bar for traction rows, ignored for free slip. Evaluated at the boundary
/// node position (not the shifted collocation point).
using BcField = std::function<Vec2(const Vec2& pos, const Vec2& normal, BcTag tag, double load)>;

struct BenchmarkCase {
  std::string id;
  DomainSpec domain;
  MaterialModel material;
  BcField bc;
  std::function<Vec2(const Vec2&)> exact;  // null when no closed form exists
  LoadProgram loads{1.0, 1.0, 1.0};
};

inline double uniform_density(double h) {
  if (!(h > 0.0)) throw InvalidInputError("node spacing must be positive");
  return 2.0 / (std::sqrt(3.0) * h * h);  // rho with theta/sqrt(rho) == h
}

inline std::function<Vec2(const BoundaryRow&, double)> bind_bc(const Discretization& disc,
                                                               const BcField& bc) {
  return [&disc, bc](const BoundaryRow& row, double load) {
    return bc(disc.cloud().pos[row.node], row.normal, row.tag, load);
  };
}

namespace seg {

inline BoundarySegment line(const Vec2& a, const Vec2& b, const Vec2& n, BcTag tag) {
  return {0.0, 1.0, [a, b](double t) { return Vec2(a + t * (b - a)); },
          [n](double) { return n; }, tag};
}

/// Circular arc r(theta) = R, theta from th0 to th1; `sign` +1 for an outward
/// normal pointing away from the center, -1 toward it.
inline BoundarySegment arc(double R, double th0, double th1, double sign, BcTag tag) {
  return {th0, th1, [R](double t) { return Vec2(R * std::cos(t), R * std::sin(t)); },
          [sign](double t) { return Vec2(sign * std::cos(t), sign * std::sin(t)); }, tag};
}

}  // namespace seg

// ---------------------------------------------------------------------------
// Timoshenko cantilever (plane stress), closed-form cubic solution.

struct TimoshenkoParams {
  double L = 1.0, D = 0.25, E = 1.0, nu = 0.3, F0 = -0.1;
  double I() const { return D * D * D / 12.0; }
};

inline Vec2 timoshenko_exact(double x1, double x2, const TimoshenkoParams& pr) {
  const double c = pr.F0 / (6.0 * pr.E * pr.I());
  const double y = x2 - pr.D / 2.0;
  double u1 = c * y * ((6.0 * pr.L - 3.0 * x1) * x1 + (2.0 + pr.nu) * (x2 * x2 - pr.D * x2));
  double u2 = -c * (3.0 * pr.nu * y * y * (pr.L - x1) + (4.0 + 5.0 * pr.nu) * pr.D * pr.D * x1 / 4.0 +
                    (3.0 * pr.L - x1) * x1 * x1);
  return {u1, u2};
}

/// (s11, s22, s12) of the exact field; s22 vanishes identically.
inline Eigen::Vector3d timoshenko_stress(double x1, double x2, const TimoshenkoParams& pr) {
  const double I = pr.I();
  double s11 = pr.F0 / I * (pr.L - x1) * (x2 - pr.D / 2.0);
  double s12 = pr.F0 / (2.0 * I) * x2 * (x2 - pr.D);
  return {s11, 0.0, s12};
}

inline BenchmarkCase timoshenko_case(TimoshenkoParams pr = {}) {
  BenchmarkCase c;
  c.id = "timoshenko";
  c.material.E = pr.E;
  c.material.nu = pr.nu;
  c.material.mode = PlaneMode::plane_stress;
  c.domain.segments = {
      seg::line({0, 0}, {pr.L, 0}, {0, -1}, BcTag::traction),
      seg::line({pr.L, 0}, {pr.L, pr.D}, {1, 0}, BcTag::traction),
      seg::line({pr.L, pr.D}, {0, pr.D}, {0, 1}, BcTag::traction),
      seg::line({0, pr.D}, {0, 0}, {-1, 0}, BcTag::dirichlet),
  };
  c.domain.density = [](const Vec2&) { return 1.0; };  // caller overrides
  c.bc = [pr](const Vec2& p, const Vec2& n, BcTag tag, double load) -> Vec2 {
    if (tag == BcTag::dirichlet) return Vec2(load * timoshenko_exact(p.x(), p.y(), pr));
    Eigen::Vector3d s = load * timoshenko_stress(p.x(), p.y(), pr);
    return {n.x() * s(0) + n.y() * s(2), n.x() * s(2) + n.y() * s(1)};
  };
  c.exact = [pr](const Vec2& p) { return timoshenko_exact(p.x(), p.y(), pr); };
  return c;
}

// ---------------------------------------------------------------------------
// Infinite plate with a circular hole (Kirsch), quarter model.

struct PlateHoleParams {
  double Ri = 1.0, W = 4.0, E = 1.0, nu = 0.3, sigma_inf = 1.0;
};

/// Closed-form displacement; `beta` follows the plane mode of the material.
inline Vec2 plate_hole_exact(double r, double theta, const PlateHoleParams& pr,
                             PlaneMode mode = PlaneMode::plane_stress) {
  if (r < pr.Ri * (1.0 - 1e-12)) throw InvalidInputError("plate-hole point inside the hole");
  const double G = pr.E / (2.0 * (1.0 + pr.nu));
  const double beta =
      mode == PlaneMode::plane_stress ? (3.0 - pr.nu) / (1.0 + pr.nu) : 3.0 - 4.0 * pr.nu;
  const double a = pr.sigma_inf * pr.Ri / (8.0 * G);
  const double q = pr.Ri / r;
  double u1 = a * ((beta + 1.0) * (r / pr.Ri) * std::cos(theta) +
                   2.0 * q * ((beta + 1.0) * std::cos(theta) + std::cos(3.0 * theta)) -
                   2.0 * q * q * q * std::cos(3.0 * theta));
  // Final term read as sin(3 theta): the cosine variant breaks equilibrium and
  // the symmetry u2(theta = 0) = 0.
  double u2 = a * ((beta - 3.0) * (r / pr.Ri) * std::sin(theta) +
                   2.0 * q * ((1.0 - beta) * std::sin(theta) + std::sin(3.0 * theta)) -
                   2.0 * q * q * q * std::sin(3.0 * theta));
  return {u1, u2};
}

/// Kirsch stress field in Cartesian components (s11, s22, s12); independent of
/// the plane mode.
inline Eigen::Vector3d kirsch_stress(double r, double theta, const PlateHoleParams& pr) {
  const double q2 = pr.Ri * pr.Ri / (r * r);
  const double q4 = q2 * q2;
  const double s = pr.sigma_inf;
  double srr = 0.5 * s * (1.0 - q2) + 0.5 * s * (1.0 - 4.0 * q2 + 3.0 * q4) * std::cos(2 * theta);
  double stt = 0.5 * s * (1.0 + q2) - 0.5 * s * (1.0 + 3.0 * q4) * std::cos(2 * theta);
  double srt = -0.5 * s * (1.0 + 2.0 * q2 - 3.0 * q4) * std::sin(2 * theta);
  const double c = std::cos(theta), sn = std::sin(theta);
  double s11 = c * c * srr + sn * sn * stt - 2.0 * c * sn * srt;
  double s22 = sn * sn * srr + c * c * stt + 2.0 * c * sn * srt;
  double s12 = c * sn * (srr - stt) + (c * c - sn * sn) * srt;
  return {s11, s22, s12};
}

inline BenchmarkCase plate_hole_case(PlateHoleParams pr = {},
                                     PlaneMode mode = PlaneMode::plane_stress) {
  BenchmarkCase c;
  c.id = "plate_hole";
  c.material.E = pr.E;
  c.material.nu = pr.nu;
  c.material.mode = mode;
  const double W = pr.W;
  c.domain.segments = {
      seg::line({pr.Ri, 0}, {W, 0}, {0, -1}, BcTag::free_slip),
      seg::line({W, 0}, {W, W}, {1, 0}, BcTag::traction),
      seg::line({W, W}, {0, W}, {0, 1}, BcTag::traction),
      seg::line({0, W}, {0, pr.Ri}, {-1, 0}, BcTag::free_slip),
      seg::arc(pr.Ri, std::numbers::pi / 2.0, 0.0, -1.0, BcTag::traction),
  };
  c.domain.density = [](const Vec2&) { return 1.0; };
  c.bc = [pr](const Vec2& p, const Vec2& n, BcTag tag, double load) -> Vec2 {
    if (tag != BcTag::traction) return Vec2::Zero();
    const double r = p.norm();
    if (r < pr.Ri * 1.5) return Vec2::Zero();  // traction-free hole surface
    Eigen::Vector3d s = load * kirsch_stress(r, std::atan2(p.y(), p.x()), pr);
    return {n.x() * s(0) + n.y() * s(2), n.x() * s(2) + n.y() * s(1)};
  };
  if (mode == PlaneMode::plane_stress)
    c.exact = [pr, mode](const Vec2& p) {
      return plate_hole_exact(p.norm(), std::atan2(p.y(), p.x()), pr, mode);
    };
  return c;
}

inline BenchmarkCase plate_hole_plastic_case() {
  PlateHoleParams pr;
  pr.sigma_inf = 1.0;  // load factor carries the amplitude
  BenchmarkCase c = plate_hole_case(pr, PlaneMode::plane_strain);
  c.id = "plate_hole_plastic";
  c.material.curve = HardeningCurve::linear(0.1, 0.25);
  c.loads = {0.0, 0.1, 0.01};
  c.exact = nullptr;
  return c;
}

// ---------------------------------------------------------------------------
// Internally pressurized annulus (plane strain), section of angle `span`.

struct AnnulusParams {
  double Ri = 1.0, Ro = 2.0, E = 1000.0, nu = 0.3, p0 = 1.0;
  double span = std::numbers::pi / 2.0;
};

inline double annulus_exact_ur(double r, const AnnulusParams& pr) {
  if (r < pr.Ri * (1.0 - 1e-12) || r > pr.Ro * (1.0 + 1e-12))
    throw InvalidInputError("annulus point outside [Ri, Ro]");
  const double G = pr.E / (2.0 * (1.0 + pr.nu));
  const double lam = pr.nu * pr.E / ((1.0 + pr.nu) * (1.0 - 2.0 * pr.nu));
  const double den = pr.Ri * pr.Ri - pr.Ro * pr.Ro;
  return -pr.Ri * pr.Ri * pr.p0 / (2.0 * (G + lam) * den) * r -
         pr.Ri * pr.Ri * pr.Ro * pr.Ro * pr.p0 / (2.0 * G * den) / r;
}

/// Lame stress field (srr, stt) of the pressurized annulus.
inline Vec2 annulus_stress_polar(double r, const AnnulusParams& pr) {
  const double k = pr.Ri * pr.Ri * pr.p0 / (pr.Ro * pr.Ro - pr.Ri * pr.Ri);
  const double q = pr.Ro * pr.Ro / (r * r);
  return {k * (1.0 - q), k * (1.0 + q)};
}

inline BenchmarkCase annulus_case(AnnulusParams pr = {}) {
  BenchmarkCase c;
  c.id = "annulus";
  c.material.E = pr.E;
  c.material.nu = pr.nu;
  c.material.mode = PlaneMode::plane_strain;
  const double A = pr.span;
  const Vec2 e(std::cos(A), std::sin(A));
  c.domain.segments = {
      seg::line({pr.Ri, 0}, {pr.Ro, 0}, {0, -1}, BcTag::free_slip),
      seg::arc(pr.Ro, 0.0, A, 1.0, BcTag::traction),
      seg::line(pr.Ro * e, pr.Ri * e, {-e.y(), e.x()}, BcTag::free_slip),
      seg::arc(pr.Ri, A, 0.0, -1.0, BcTag::traction),
  };
  c.domain.density = [](const Vec2&) { return 1.0; };
  const double r_mid = 0.5 * (pr.Ri + pr.Ro);
  c.bc = [pr, r_mid](const Vec2& p, const Vec2& n, BcTag tag, double load) -> Vec2 {
    if (tag != BcTag::traction) return Vec2::Zero();
    if (p.norm() > r_mid) return Vec2::Zero();  // outer surface free
    return Vec2(-load * pr.p0 * n);             // internal pressure
  };
  c.exact = [pr](const Vec2& p) {
    const double r = p.norm();
    return Vec2(annulus_exact_ur(r, pr) / r * p);
  };
  return c;
}

inline BenchmarkCase annulus_plastic_case() {
  AnnulusParams pr;
  pr.span = std::numbers::pi / 6.0;
  BenchmarkCase c = annulus_case(pr);
  c.id = "annulus_plastic";
  c.material.curve = HardeningCurve::linear(20.0, 0.0);
  c.loads = {8.0, 10.5, 0.1};
  c.exact = nullptr;
  return c;
}

inline BenchmarkCase make_case(const std::string& id) {
  if (id == "timoshenko") return timoshenko_case();
  if (id == "plate_hole") return plate_hole_case();
  if (id == "annulus") return annulus_case();
  if (id == "annulus_plastic") return annulus_plastic_case();
  if (id == "plate_hole_plastic") return plate_hole_plastic_case();
  throw ConfigError("unknown case id: " + id);
}

// ---------------------------------------------------------------------------
// Error metrics.

/// Relative L2 displacement error over all nodes.
inline double e2_norm(const NodeCloud& cloud, const Eigen::VectorXd& u,
                      const std::function<Vec2(const Vec2&)>& exact) {
  double num = 0.0, den = 0.0;
  for (int l = 0; l < cloud.size(); ++l) {
    Vec2 ue = exact(cloud.pos[l]);
    Vec2 d = Vec2(u(2 * l), u(2 * l + 1)) - ue;
    num += d.squaredNorm();
    den += ue.squaredNorm();
  }
  if (den == 0.0) throw InvalidInputError("exact field vanishes; e2 undefined");
  return std::sqrt(num / den);
}

struct LineSample {
  double r = 0.0;
  double error = 0.0;
  bool skipped = false;  // reference value was zero at this sample
};

/// Pointwise relative error |y - y_ref| / |y_ref| along a sampled line.
inline std::vector<LineSample> line_error(const std::function<double(double)>& y,
                                          const std::function<double(double)>& y_ref,
                                          double r0, double r1, int samples = 200) {
  std::vector<LineSample> out;
  for (int i = 0; i < samples; ++i) {
    LineSample s;
    s.r = r0 + (r1 - r0) * i / (samples - 1);
    double ref = y_ref(s.r);
    if (ref == 0.0) {
      s.skipped = true;
    } else {
      s.error = std::abs(y(s.r) - ref) / std::abs(ref);
    }
    out.push_back(s);
  }
  return out;
}

/// Approximation-induced-discontinuity metric: each inner node l gets a
/// splitting point halfway to its nearest neighbor n(l); the displacement is
/// interpolated there from both supports and the relative L2 mismatch taken.
/// When n(c) = l was already assigned for the candidate c, the next-nearest
/// neighbor is used so all splitting points are distinct.
inline double aid_metric(const Discretization& disc, const Eigen::VectorXd& u) {
  const NodeCloud& cloud = disc.cloud();
  CellGrid grid(cloud.pos, cloud.min_h());
  std::map<int, int> nearest;  // l -> n(l), insertion in node order
  for (int l = 0; l < cloud.size(); ++l) {
    if (cloud.kind[l] == NodeKind::boundary) continue;
    auto cand = grid.k_nearest(cloud.pos[l], std::min(cloud.size(), 8));
    int pick = -1;
    for (int c : cand) {
      if (c == l) continue;
      auto it = nearest.find(c);
      if (it != nearest.end() && it->second == l) continue;  // midpoint already claimed
      pick = c;
      break;
    }
    if (pick < 0) pick = cand.size() > 1 ? cand[1] : l;
    nearest[l] = pick;
  }
  double num = 0.0, den = 0.0;
  for (auto [l, n] : nearest) {
    Vec2 mid = 0.5 * (cloud.pos[l] + cloud.pos[n]);
    Vec2 ua = disc.interpolate_displacement(l, mid, u);
    Vec2 ub = disc.interpolate_displacement(n, mid, u);
    num += (ua - ub).squaredNorm();
    den += ua.squaredNorm();
  }
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

/// kappa = s_max / s_min by dense SVD; refuses matrices above `dense_limit`.
inline double condition_number(const SparseMat& K, int dense_limit = 4200) {
  if (K.rows() > dense_limit)
    throw InvalidInputError("matrix too large for dense condition-number estimation");
  Eigen::MatrixXd A(K);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

/// Single-point relative error of the solution extrapolated to `corner` via
/// the nearest node's local interpolant.
inline double corner_extrapolation_error(const Discretization& disc, const Eigen::VectorXd& u,
                                         const Vec2& corner,
                                         const std::function<Vec2(const Vec2&)>& exact) {
  const NodeCloud& cloud = disc.cloud();
  int best = 0;
  for (int l = 1; l < cloud.size(); ++l)
    if ((cloud.pos[l] - corner).squaredNorm() < (cloud.pos[best] - corner).squaredNorm())
      best = l;
  Vec2 ue = exact(corner);
  Vec2 un = disc.interpolate_displacement(best, corner, u);
  double den = ue.norm();
  if (den == 0.0) throw InvalidInputError("exact corner value vanishes");
  return (un - ue).norm() / den;
}

/// Least-squares slope of log(y) against log(x).
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidInputError("slope fit needs matching samples, at least two");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Polar stress helpers for axisymmetry diagnostics.

inline double polar_sigma_rphi(const Vec2& p, const Voigt4& s) {
  const double th = std::atan2(p.y(), p.x());
  const double c = std::cos(th), sn = std::sin(th);
  return -c * sn * s(0) + c * sn * s(1) + (c * c - sn * sn) * s(3);
}

inline double polar_sigma_phiphi(const Vec2& p, const Voigt4& s) {
  const double th = std::atan2(p.y(), p.x());
  const double c = std::cos(th), sn = std::sin(th);
  return sn * sn * s(0) + c * c * s(1) - 2.0 * c * sn * s(3);
}

// ---------------------------------------------------------------------------
// Sweep driver: cartesian product of parameter grids on one benchmark case.

struct SweepSpec {
  std::string case_id = "annulus";
  std::vector<double> h_list{0.066};
  std::vector<int> p_list{2};
  std::vector<Approach> approaches{Approach::composed};
  std::vector<double> alpha_d_list{0.5};
  std::vector<double> alpha_s_list{0.0};
  int m = 3;
  int p_fd = 2;
  unsigned long long seed = 1;
  NewtonOptions newton;
  bool with_kappa = false;
  int threads = 1;
};

struct SweepCell {
  std::string case_id;
  Approach approach = Approach::composed;
  double h = 0.0;
  int p = 0;
  double alpha_d = 0.0, alpha_s = 0.0;
  bool converged = false;
  std::string error;  // failure note; empty on success
  double e2 = std::numeric_limits<double>::quiet_NaN();
  double e_int = std::numeric_limits<double>::quiet_NaN();
  double kappa = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;  // total Newton iterations across steps
};

struct SweepResult {
  std::vector<SweepCell> cells;
  /// Slope of log(e2) vs log(h) per (approach, p, alpha_d, alpha_s) group
  /// with at least two converged h levels.
  std::vector<std::pair<std::string, double>> slopes;
};

inline SweepResult run_sweep(const SweepSpec& spec) {
  SweepResult result;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;

  for (Approach ap : spec.approaches)
    for (int p : spec.p_list)
      for (double ad : spec.alpha_d_list)
        for (double as : spec.alpha_s_list)
          for (double h : spec.h_list) {
            SweepCell cell;
            cell.case_id = spec.case_id;
            cell.approach = ap;
            cell.h = h;
            cell.p = p;
            cell.alpha_d = ad;
            cell.alpha_s = as;
            try {
              BenchmarkCase bc = make_case(spec.case_id);
              bc.domain.density = [h](const Vec2&) { return uniform_density(h); };
              bc.domain.finalize();
              NodeCloud cloud = generate_nodes(bc.domain, spec.seed);
              ApproachConfig cfg;
              cfg.approach = ap;
              cfg.m = spec.m;
              cfg.p = p;
              cfg.p_fd = spec.p_fd;
              cfg.alpha_d = ad;
              cfg.alpha_s = as;
              Discretization disc(std::move(cloud), bc.domain, cfg, bc.material, spec.threads);
              SolveReport rep =
                  run_load_program(disc, bind_bc(disc, bc.bc), bc.loads, spec.newton);
              cell.converged = rep.success;
              for (const auto& st : rep.steps) cell.iterations += st.iters;
              if (!rep.success) cell.error = rep.message;
              if (rep.success && bc.exact) cell.e2 = e2_norm(disc.cloud(), rep.u, bc.exact);
              if (rep.success) cell.e_int = aid_metric(disc, rep.u);
              if (spec.with_kappa) {
                StateField sf = disc.make_state_field();
                cell.kappa = condition_number(disc.assemble_tangent(sf));
              }
            } catch (const std::exception& e) {
              cell.error = e.what();
            }
            result.cells.push_back(cell);
            if (cell.converged && std::isfinite(cell.e2)) {
              std::string key = std::string(to_string(ap)) + "/p" + std::to_string(p) + "/ad" +
                                std::to_string(ad) + "/as" + std::to_string(as);
              groups[key].first.push_back(h);
              groups[key].second.push_back(cell.e2);
            }
          }

  for (auto& [key, xy] : groups)
    if (xy.first.size() >= 2)
      result.slopes.emplace_back(key, fit_loglog_slope(xy.first, xy.second));
  return result;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << "case,approach,h,p,alpha_d,alpha_s,converged,e2,e_int,kappa,iterations,error\n";
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& c : r.cells) {
    os << c.case_id << ',' << to_string(c.approach) << ',' << num(c.h) << ',' << c.p << ','
       << num(c.alpha_d) << ',' << num(c.alpha_s) << ',' << (c.converged ? 1 : 0) << ','
       << num(c.e2) << ',' << num(c.e_int) << ',' << num(c.kappa) << ',' << c.iterations << ','
       << c.error << '\n';
  }
  os << "# slopes\n";
  for (const auto& [key, slope] : r.slopes) os << "# " << key << " " << num(slope) << '\n';
}

}  // namespace rbffd
