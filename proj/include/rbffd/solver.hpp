#pragma once

#include <Eigen/SparseLU>
#include <functional>

#include "rbffd/assembly.hpp"

namespace rbffd {

/// Load steps p_min, p_min + dp, ..., p_max (inclusive up to rounding).
struct LoadProgram {
  double p_min = 0.0;
  double p_max = 1.0;
  double dp = 1.0;

  std::vector<double> steps() const {
    if (!(dp > 0.0) || p_max < p_min) throw ConfigError("invalid load program");
    std::vector<double> out;
    const int n = static_cast<int>(std::llround((p_max - p_min) / dp));
    if (std::abs(p_min + n * dp - p_max) > 1e-9 * std::max(1.0, std::abs(p_max)))
      throw ConfigError("load step dp does not divide the load range");
    for (int i = 0; i <= n; ++i) out.push_back(p_min + i * dp);
    return out;
  }
};

struct NewtonOptions {
  double tol = 1e-7;
  int max_iters = 70;
  bool residual_force_rows_only = false;  // relative norm over PDE rows only
};

struct StepRecord {
  double load = 0.0;
  int iters = 0;
  bool converged = false;
  bool plastic = false;                 // any plastic tangent in converged state
  std::vector<double> rel_residual;     // after each Newton solve
  std::vector<double> rho;              // max |nodal force residual|, per iteration
};

struct SolveReport {
  bool success = false;
  std::string message;
  std::vector<StepRecord> steps;
  Eigen::VectorXd u;
  StateField state;
};

/// Convergence order k of one Newton history by least squares on
/// log(rho_{i+1}) = log(A0) + k log(rho_i), using strictly decreasing pairs.
inline double measure_nr_order(const std::vector<double>& rho) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i + 1 < rho.size(); ++i)
    if (rho[i] > 0.0 && rho[i + 1] > 0.0 && rho[i + 1] < rho[i])
      pts.emplace_back(std::log(rho[i]), std::log(rho[i + 1]));
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace detail {

/// Re-predict every evaluation point from the committed state with the strain
/// increment of du; writes updated stresses and tangents into `iter`.
inline bool update_states(const Discretization& disc, const StateField& committed,
                          const Eigen::VectorXd& du, StateField& iter) {
  bool plastic = false;
  const MaterialModel& mat = disc.material();
  const int N = disc.cloud().size();
  for (int l = 0; l < N; ++l) {
    auto rm = return_map(committed.node[l], disc.strain_at_node(l, du), mat, l);
    iter.node[l] = rm.state;
    iter.D_node[l] = rm.tangent.D;
    plastic = plastic || rm.tangent.plastic;
  }
  if (disc.config().approach == Approach::hybrid) {
    for (std::size_t k = 0; k < disc.pde_nodes().size(); ++k) {
      for (int f = 0; f < disc.config().n_dp(); ++f) {
        auto rm = return_map(committed.sn[k][f], disc.strain_at_sn(static_cast<int>(k), f, du),
                             mat, disc.pde_nodes()[k]);
        iter.sn[k][f] = rm.state;
        iter.D_sn[k][f] = rm.tangent.D;
        plastic = plastic || rm.tangent.plastic;
      }
    }
  }
  for (std::size_t b = 0; b < disc.boundary_rows().size(); ++b) {
    auto rm = return_map(committed.bnd[b],
                         disc.strain_at_boundary_row(static_cast<int>(b), du), mat,
                         disc.boundary_rows()[b].node);
    iter.bnd[b] = rm.state;
    iter.D_bnd[b] = rm.tangent.D;
    plastic = plastic || rm.tangent.plastic;
  }
  return plastic;
}

/// Plastic-branch limit of the consistent tangent at vanishing plastic
/// multiplier. A valid generalized Jacobian of the stress update at points
/// sitting exactly on the yield surface, where the update is not
/// differentiable.
inline Mat4 plastic_branch_tangent(const Voigt4& sigma, double ep_bar,
                                   const MaterialModel& mat) {
  const Voigt4 s = deviator(sigma);
  const double s_norm =
      std::sqrt(s(0) * s(0) + s(1) * s(1) + s(2) * s(2) + 2.0 * s(3) * s(3));
  Mat4 D = elastic_tensor(mat).D;
  if (!(s_norm > 0.0)) return D;
  const Voigt4 n_bar = s / s_norm;
  const double G = mat.G();
  const double H = mat.curve.slope(ep_bar);
  return D - 6.0 * G * G / (3.0 * G + H) * (n_bar * n_bar.transpose());
}

/// Breaks semismooth-Newton chattering: with perfect plasticity a material
/// point balanced exactly on the yield surface can flip between the elastic
/// and plastic branch every iteration, trapping the iteration in a limit
/// cycle. Points whose branch flipped repeatedly across accepted iterates get
/// their tangent pinned to the plastic-branch limit, which selects one element
/// of the generalized Jacobian consistently; the residual is never altered.
class ChatterGuard {
 public:
  explicit ChatterGuard(const Discretization& disc) {
    node_.assign(disc.cloud().size(), {});
    sn_.assign(disc.pde_nodes().size() * std::max(disc.n_dp(), 0), {});
    bnd_.assign(disc.boundary_rows().size(), {});
  }

  /// Pin every committed-plastic point that starts the step exactly on the
  /// yield surface. At zero strain increment the return map reports such
  /// points as elastic, but with an active load increment they flow; taking
  /// the plastic-branch element of the generalized Jacobian from the outset
  /// avoids a first Newton direction that is an ascent direction.
  void prime(const Discretization& disc, const StateField& committed) {
    const MaterialModel& mat = disc.material();
    const double band = -1e-9 * mat.sigma_y0();
    auto on_surface = [&](const MaterialState& s) {
      return s.ep_bar > 0.0 && yield_function(s.sigma, s.ep_bar, mat) > band;
    };
    for (std::size_t l = 0; l < node_.size(); ++l)
      if (on_surface(committed.node[l])) node_[l].pinned = 1;
    const int ndp = disc.n_dp();
    for (std::size_t k = 0; k < committed.sn.size(); ++k)
      for (int f = 0; f < ndp; ++f)
        if (on_surface(committed.sn[k][f])) sn_[k * ndp + f].pinned = 1;
    for (std::size_t b = 0; b < bnd_.size(); ++b)
      if (on_surface(committed.bnd[b])) bnd_[b].pinned = 1;
  }

  void observe_and_pin(const Discretization& disc, const StateField& committed,
                       StateField& iter) {
    const MaterialModel& mat = disc.material();
    for (std::size_t l = 0; l < node_.size(); ++l)
      track(node_[l], committed.node[l], iter.node[l], iter.D_node[l], mat);
    const int ndp = disc.n_dp();
    for (std::size_t k = 0; k < iter.sn.size(); ++k)
      for (int f = 0; f < ndp; ++f)
        track(sn_[k * ndp + f], committed.sn[k][f], iter.sn[k][f], iter.D_sn[k][f], mat);
    for (std::size_t b = 0; b < bnd_.size(); ++b)
      track(bnd_[b], committed.bnd[b], iter.bnd[b], iter.D_bnd[b], mat);
  }

  /// Re-apply the pinned tangents without updating flip statistics (used after
  /// priming, before the first assembly).
  void apply(const Discretization& disc, const StateField& committed, StateField& iter) const {
    const MaterialModel& mat = disc.material();
    for (std::size_t l = 0; l < node_.size(); ++l)
      override_if_pinned(node_[l], committed.node[l], iter.node[l], iter.D_node[l], mat);
    const int ndp = disc.n_dp();
    for (std::size_t k = 0; k < iter.sn.size(); ++k)
      for (int f = 0; f < ndp; ++f)
        override_if_pinned(sn_[k * ndp + f], committed.sn[k][f], iter.sn[k][f],
                           iter.D_sn[k][f], mat);
    for (std::size_t b = 0; b < bnd_.size(); ++b)
      override_if_pinned(bnd_[b], committed.bnd[b], iter.bnd[b], iter.D_bnd[b], mat);
  }

 private:
  struct Point {
    char last_plastic = 0;
    char pinned = 0;
    int flips = 0;
  };

  static void override_if_pinned(const Point& pt, const MaterialState& committed,
                                 const MaterialState& cur, Mat4& D, const MaterialModel& mat) {
    const bool plastic_now = cur.ep_bar > committed.ep_bar + 1e-16;
    if (pt.pinned && !plastic_now) D = plastic_branch_tangent(cur.sigma, cur.ep_bar, mat);
  }

  static void track(Point& pt, const MaterialState& committed, const MaterialState& cur,
                    Mat4& D, const MaterialModel& mat) {
    const char plastic_now = cur.ep_bar > committed.ep_bar + 1e-16;
    if (plastic_now != pt.last_plastic) ++pt.flips;
    pt.last_plastic = plastic_now;
    if (pt.flips >= 3) pt.pinned = 1;
    if (pt.pinned && !plastic_now) D = plastic_branch_tangent(cur.sigma, cur.ep_bar, mat);
  }

  std::vector<Point> node_, sn_, bnd_;
};

inline double relative_residual(const Discretization& disc, const Eigen::VectorXd& r,
                                const Eigen::VectorXd& f_ext, const NewtonOptions& opt) {
  double num;
  if (opt.residual_force_rows_only) {
    num = 0.0;
    for (int l : disc.pde_nodes())
      num += r(2 * l) * r(2 * l) + r(2 * l + 1) * r(2 * l + 1);
    num = std::sqrt(num);
  } else {
    num = r.norm();
  }
  const double den = f_ext.norm();
  return den > 1e-300 ? num / den : num;
}

}  // namespace detail

/// Incremental Newton-Raphson driver over a load program. `bc_value` maps a
/// boundary row and the current load factor to the prescribed value (u-bar or
/// T-bar). The optional `on_step` callback sees each converged step.
inline SolveReport run_load_program(
    const Discretization& disc,
    const std::function<Vec2(const BoundaryRow&, double)>& bc_value, const LoadProgram& prog,
    const NewtonOptions& opt = {},
    const std::function<void(int, const StepRecord&, const Eigen::VectorXd&,
                             const StateField&)>& on_step = nullptr) {
  SolveReport rep;
  const int ndof = disc.dofs();
  rep.u = Eigen::VectorXd::Zero(ndof);
  StateField committed = disc.make_state_field();
  StateField iter = committed;
  Eigen::SparseLU<SparseMat> lu;

  const auto loads = prog.steps();
  for (std::size_t step = 0; step < loads.size(); ++step) {
    StepRecord rec;
    rec.load = loads[step];
    std::vector<Vec2> targets(disc.boundary_rows().size());
    for (std::size_t b = 0; b < targets.size(); ++b)
      targets[b] = bc_value(disc.boundary_rows()[b], rec.load);

    Eigen::VectorXd du = Eigen::VectorXd::Zero(ndof);
    Eigen::VectorXd r, f_ext;
    detail::ChatterGuard guard(disc);
    bool plastic = detail::update_states(disc, committed, du, iter);
    guard.prime(disc, committed);
    guard.apply(disc, committed, iter);
    disc.residual(iter, targets, rep.u + du, r, f_ext);
    const double rel0 = detail::relative_residual(disc, r, f_ext, opt);
    if (rel0 <= opt.tol) {
      // already in equilibrium (e.g. a zero load increment)
      rec.converged = true;
      rec.rel_residual.push_back(rel0);
    }

    // Backtracking on the residual norm. The full step is taken whenever it
    // reduces the residual, so well-behaved steps see plain Newton; halving
    // only kicks in when branch switches of the return map make the full
    // step overshoot (yield-surface cycling).
    Eigen::VectorXd r_try, f_try;
    auto search = [&](const Eigen::VectorXd& dir, double r_old, double& best_f,
                      double& best_norm) {
      best_f = 0.0;
      best_norm = std::numeric_limits<double>::infinity();
      for (double f = 1.0; f > 1.0 / (1 << 20); f *= 0.5) {
        try {
          detail::update_states(disc, committed, du + f * dir, iter);
        } catch (const MaterialError&) {
          continue;  // states blew up at this step length; shorten further
        }
        disc.residual(iter, targets, rep.u + du + f * dir, r_try, f_try);
        const double n_try = r_try.norm();
        if (std::isfinite(n_try) && n_try < best_norm) {
          best_f = f;
          best_norm = n_try;
        }
        if (std::isfinite(n_try) && n_try <= (1.0 - 1e-4 * f) * r_old) break;
      }
    };

    for (int it = 0; !rec.converged && it < opt.max_iters; ++it) {
      SparseMat K = disc.assemble_tangent(iter);
      K.makeCompressed();
      lu.compute(K);
      if (lu.info() != Eigen::Success) {
        rep.message = "tangent factorization failed at load " + std::to_string(rec.load);
        rep.steps.push_back(rec);
        return rep;
      }
      Eigen::VectorXd dir = lu.solve(-r);
      rec.iters = it + 1;

      const double r_old = r.norm();
      double best_f, best_norm;
      search(dir, r_old, best_f, best_norm);
      if (!(best_norm < r_old)) {
        // The pinned generalized Jacobian produced no descent direction. Fall
        // back to the Jacobian of the states exactly as the return map reports
        // them (no pins) and search again; an ascent step is never accepted.
        detail::update_states(disc, committed, du, iter);
        SparseMat K2 = disc.assemble_tangent(iter);
        K2.makeCompressed();
        lu.compute(K2);
        if (lu.info() == Eigen::Success) {
          dir = lu.solve(-r);
          search(dir, r_old, best_f, best_norm);
        }
        if (!(best_norm < r_old)) {
          rep.message = "Newton stalled (no descent direction) at load " +
                        std::to_string(rec.load);
          break;
        }
      }
      du += best_f * dir;
      plastic = detail::update_states(disc, committed, du, iter);
      guard.observe_and_pin(disc, committed, iter);
      disc.residual(iter, targets, rep.u + du, r, f_ext);
      rec.rel_residual.push_back(detail::relative_residual(disc, r, f_ext, opt));
      double rho_max = 0.0;
      for (int l : disc.pde_nodes())
        rho_max = std::max({rho_max, std::abs(r(2 * l)), std::abs(r(2 * l + 1))});
      rec.rho.push_back(rho_max);
      if (!std::isfinite(rec.rel_residual.back())) break;
      if (rec.rel_residual.back() <= opt.tol) {
        rec.converged = true;
        break;
      }
    }

    rec.plastic = plastic;
    rep.steps.push_back(rec);
    if (!rec.converged) {
      rep.message = "Newton did not converge at load " + std::to_string(rec.load);
      rep.state = iter;
      return rep;
    }
    rep.u += du;
    committed = iter;
    if (on_step) on_step(static_cast<int>(step), rep.steps.back(), rep.u, committed);
  }

  rep.success = true;
  rep.state = committed;
  return rep;
}

/// Convenience wrapper: a single unit load step (linear elastic problems).
inline SolveReport solve_elastic(const Discretization& disc,
                                 const std::function<Vec2(const BoundaryRow&, double)>& bc_value,
                                 const NewtonOptions& opt = {}) {
  return run_load_program(disc, bc_value, LoadProgram{1.0, 1.0, 1.0}, opt);
}

}  // namespace rbffd
