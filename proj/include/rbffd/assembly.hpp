#pragma once

#include <Eigen/Sparse>
#include <atomic>
#include <thread>

#include "rbffd/approximation.hpp"
#include "rbffd/constitutive.hpp"

namespace rbffd {

using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct ApproachConfig {
  Approach approach = Approach::composed;
  int m = 3;        // PHS order
  int p = 2;        // augmentation order
  int p_fd = 2;     // FD order of the hybrid divergence stencil
  double alpha_d = 0.5;
  double alpha_s = 0.0;

  int basis_count() const { return (p + 1) * (p + 2) / 2; }
  int support_size() const { return 2 * basis_count() + 1; }
  double alpha_d_max() const { return p_fd == 2 ? 1.0 : 0.5; }
  int n_dp() const { return p_fd == 2 ? 4 : 8; }

  void validate() const {
    if (m % 2 == 0 || m < 1) throw ConfigError("PHS order m must be odd and positive");
    if (p < 1) throw ConfigError("augmentation order must be at least 1");
    if (p_fd != 2 && p_fd != 4) throw ConfigError("p_fd must be 2 or 4");
    if (!(alpha_d > 0.0)) throw ConfigError("alpha_d must be positive");
    if (alpha_s < 0.0) throw ConfigError("alpha_s must be nonnegative");
  }
};

/// Boundary collocation row: operators evaluated at the inward-shifted point.
struct BoundaryRow {
  int node = -1;
  BcTag tag = BcTag::none;
  Vec2 normal = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
  Vec2 shifted = Vec2::Zero();
  ShapeWeights ops;
  double scale_u = 1.0;  // Dirichlet / normal-displacement row scale
  double scale_t = 1.0;  // traction row scale
};

/// Material states and tangents at every stress evaluation point of one
/// discretization: the nodes themselves, the hybrid secondary nodes, and the
/// shifted boundary points of traction/free-slip rows.
struct StateField {
  std::vector<MaterialState> node;
  std::vector<Mat4> D_node;
  std::vector<std::vector<MaterialState>> sn;   // [pde index][n_dp]
  std::vector<std::vector<Mat4>> D_sn;
  std::vector<MaterialState> bnd;               // [boundary row index]
  std::vector<Mat4> D_bnd;
};

inline Vec2 shifted_eval_point(const Vec2& p, const Vec2& n, double alpha_s, double h) {
  return p - alpha_s * h * n;
}

/// Precomputed stencils, operator weights, and row layout for one cloud and
/// one approach. Immutable after construction; assembly and residual
/// evaluation read the current state field.
class Discretization {
 public:
  Discretization(NodeCloud cloud, const DomainSpec& domain, ApproachConfig cfg,
                 MaterialModel mat, int threads = 1)
      : cloud_(std::move(cloud)), domain_(&domain), cfg_(cfg), mat_(mat) {
    cfg_.validate();
    const int N = cloud_.size();
    grid_ = CellGrid(cloud_.pos, cloud_.min_h());
    basis_ = AugmentationBasis::make(cfg_.p);

    stencils_.reserve(N);
    for (int l = 0; l < N; ++l)
      stencils_.emplace_back(cloud_, build_support(cloud_, grid_, l, cfg_.support_size()),
                             basis_, cfg_.m);

    node_ops_.resize(N);
    parallel_for(N, threads, [&](int l) { node_ops_[l] = stencils_[l].shape_weights(cloud_.pos[l]); });

    for (int l = 0; l < N; ++l)
      if (cloud_.kind[l] != NodeKind::boundary) pde_nodes_.push_back(l);

    if (cfg_.approach == Approach::hybrid) build_secondary_nodes(threads);
    build_boundary_rows();
  }

  const NodeCloud& cloud() const { return cloud_; }
  const ApproachConfig& config() const { return cfg_; }
  const MaterialModel& material() const { return mat_; }
  const std::vector<int>& pde_nodes() const { return pde_nodes_; }
  const std::vector<BoundaryRow>& boundary_rows() const { return boundary_rows_; }
  const Stencil& stencil(int l) const { return stencils_[l]; }
  const ShapeWeights& node_ops(int l) const { return node_ops_[l]; }
  int dofs() const { return 2 * cloud_.size(); }
  int n_dp() const { return cfg_.approach == Approach::hybrid ? cfg_.n_dp() : 0; }
  const std::vector<Vec2>& secondary_offsets(int pde_index) const {
    return sn_offsets_[pde_index];
  }

  StateField make_state_field() const {
    StateField s;
    const Mat4 De = elastic_tensor(mat_).D;
    s.node.resize(cloud_.size());
    s.D_node.assign(cloud_.size(), De);
    if (cfg_.approach == Approach::hybrid) {
      s.sn.assign(pde_nodes_.size(), std::vector<MaterialState>(cfg_.n_dp()));
      s.D_sn.assign(pde_nodes_.size(), std::vector<Mat4>(cfg_.n_dp(), De));
    }
    s.bnd.resize(boundary_rows_.size());
    s.D_bnd.assign(boundary_rows_.size(), De);
    return s;
  }

  /// In-plane Voigt strain of a displacement vector at an evaluation point
  /// whose operator weights live on the support of `stencil_node`.
  Voigt4 strain_at(int stencil_node, const ShapeWeights& ops, const Eigen::VectorXd& u) const {
    const auto& nodes = stencils_[stencil_node].support().nodes;
    double e1 = 0, e2 = 0, g12 = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double ux = u(2 * nodes[j]), uy = u(2 * nodes[j] + 1);
      e1 += ops.dx(j) * ux;
      e2 += ops.dy(j) * uy;
      g12 += ops.dy(j) * ux + ops.dx(j) * uy;
    }
    return {e1, e2, 0.0, g12};
  }

  Voigt4 strain_at_node(int l, const Eigen::VectorXd& u) const {
    return strain_at(l, node_ops_[l], u);
  }

  Voigt4 strain_at_sn(int pde_index, int f, const Eigen::VectorXd& u) const {
    return strain_at(pde_nodes_[pde_index], sn_ops_[pde_index][f], u);
  }

  Voigt4 strain_at_boundary_row(int b, const Eigen::VectorXd& u) const {
    return strain_at(boundary_rows_[b].node, boundary_rows_[b].ops, u);
  }

  /// Displacement interpolated from the local stencil of node l at point x.
  Vec2 interpolate_displacement(int l, const Vec2& x, const Eigen::VectorXd& u) const {
    Eigen::VectorXd w = stencils_[l].weights(DiffOp::identity(), x);
    const auto& nodes = stencils_[l].support().nodes;
    Vec2 out = Vec2::Zero();
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      out.x() += w(j) * u(2 * nodes[j]);
      out.y() += w(j) * u(2 * nodes[j] + 1);
    }
    return out;
  }

  SparseMat assemble_tangent(const StateField& s) const {
    std::vector<Triplet> trip;
    switch (cfg_.approach) {
      case Approach::direct: assemble_direct(s, trip); break;
      case Approach::composed: assemble_composed(s, trip); break;
      case Approach::hybrid: assemble_hybrid(s, trip); break;
    }
    assemble_bc_rows(s, trip);
    SparseMat K(dofs(), dofs());
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
  }

  /// Residual vector and the external-force vector used for its relative norm.
  /// `bc_targets` holds the prescribed value per boundary row (u-bar for
  /// Dirichlet rows, T-bar for traction rows, ignored for free slip).
  void residual(const StateField& s, const std::vector<Vec2>& bc_targets,
                const Eigen::VectorXd& u_total, Eigen::VectorXd& r,
                Eigen::VectorXd& f_ext) const {
    r = Eigen::VectorXd::Zero(dofs());
    f_ext = Eigen::VectorXd::Zero(dofs());

    if (cfg_.approach == Approach::hybrid) {
      for (std::size_t k = 0; k < pde_nodes_.size(); ++k) {
        const int l = pde_nodes_[k];
        Vec2 f = fd_divergence(k, [&](int fidx, int comp) { return s.sn[k][fidx].sigma(comp); });
        r(2 * l) = f.x();
        r(2 * l + 1) = f.y();
      }
    } else {
      for (int l : pde_nodes_) {
        const auto& nodes = stencils_[l].support().nodes;
        const auto& ops = node_ops_[l];
        double f1 = 0, f2 = 0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
          const Voigt4& sig = s.node[nodes[j]].sigma;
          f1 += ops.dx(j) * sig(0) + ops.dy(j) * sig(3);
          f2 += ops.dx(j) * sig(3) + ops.dy(j) * sig(1);
        }
        r(2 * l) = f1;
        r(2 * l + 1) = f2;
      }
    }

    for (std::size_t b = 0; b < boundary_rows_.size(); ++b) {
      const BoundaryRow& row = boundary_rows_[b];
      const int l = row.node;
      const auto& nodes = stencils_[l].support().nodes;
      const Vec2& target = bc_targets[b];
      if (row.tag == BcTag::dirichlet) {
        Vec2 uval(u_total(2 * l), u_total(2 * l + 1));
        r(2 * l) = row.scale_u * (uval.x() - target.x());
        r(2 * l + 1) = row.scale_u * (uval.y() - target.y());
        f_ext(2 * l) = row.scale_u * target.x();
        f_ext(2 * l + 1) = row.scale_u * target.y();
      } else if (row.tag == BcTag::traction) {
        const Voigt4& sig = s.bnd[b].sigma;
        Vec2 t(row.normal.x() * sig(0) + row.normal.y() * sig(3),
               row.normal.x() * sig(3) + row.normal.y() * sig(1));
        r(2 * l) = row.scale_t * (t.x() - target.x());
        r(2 * l + 1) = row.scale_t * (t.y() - target.y());
        f_ext(2 * l) = row.scale_t * target.x();
        f_ext(2 * l + 1) = row.scale_t * target.y();
      } else {  // free slip: u.n = 0 and tangential traction = 0
        const Voigt4& sig = s.bnd[b].sigma;
        const double un =
            row.normal.x() * u_total(2 * l) + row.normal.y() * u_total(2 * l + 1);
        Vec2 tn(row.normal.x() * sig(0) + row.normal.y() * sig(3),
                row.normal.x() * sig(3) + row.normal.y() * sig(1));
        r(2 * l) = row.scale_u * un;
        r(2 * l + 1) = row.scale_t * tn.dot(row.tangent);
      }
    }
  }

  /// Coordinate-format dump `row col value` of an assembled matrix.
  static void dump_matrix(std::ostream& os, const SparseMat& K) {
    for (int k = 0; k < K.outerSize(); ++k)
      for (SparseMat::InnerIterator it(K, k); it; ++it)
        os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  }

 private:
  template <typename F>
  static void parallel_for(int n, int threads, F&& fn) {
    threads = std::max(1, threads);
    if (threads == 1) {
      for (int i = 0; i < n; ++i) fn(i);
      return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      });
    for (auto& th : pool) th.join();
  }

  // Strain coefficient of support entry j as a 4x2 block on (u_x, u_y).
  static Matrix42 strain_block(double wx, double wy) {
    Matrix42 B = Matrix42::Zero();
    B(0, 0) = wx;
    B(1, 1) = wy;
    B(3, 0) = wy;
    B(3, 1) = wx;
    return B;
  }

  void build_secondary_nodes(int threads) {
    const int ndp = cfg_.n_dp();
    sn_offsets_.resize(pde_nodes_.size());
    sn_ops_.assign(pde_nodes_.size(), std::vector<ShapeWeights>(ndp));
    sn_delta_.resize(pde_nodes_.size());

    for (std::size_t k = 0; k < pde_nodes_.size(); ++k) {
      const int l = pde_nodes_[k];
      const double h = cloud_.h[l];
      double a = cfg_.alpha_d;
      auto offsets = [&](double alpha) {
        std::vector<Vec2> off;
        const double d = alpha * h;
        if (cfg_.p_fd == 2) {
          off = {{d, 0}, {-d, 0}, {0, d}, {0, -d}};
        } else {
          off = {{d, 0}, {2 * d, 0}, {-d, 0}, {-2 * d, 0},
                 {0, d}, {0, 2 * d}, {0, -d}, {0, -2 * d}};
        }
        return off;
      };
      auto all_inside = [&](const std::vector<Vec2>& off) {
        for (const auto& o : off)
          if (!domain_->contains_with_tolerance(cloud_.pos[l] + o, 1e-9 * h)) return false;
        return true;
      };
      // All secondary nodes must stay inside the domain: clamp to the
      // admissible maximum first, then shrink this node's stencil until it
      // fits (nodes near curved boundaries can be closer than alpha_d*h to
      // the boundary along an axis direction).
      a = std::min(a, cfg_.alpha_d_max());
      std::vector<Vec2> off = offsets(a);
      int shrink = 0;
      while (!all_inside(off) && ++shrink <= 80) {
        a *= 0.9;
        off = offsets(a);
      }
      if (shrink > 80)
        throw ConfigError("secondary nodes cannot be kept inside the domain at node " +
                          std::to_string(l));
      sn_offsets_[k] = off;
      sn_delta_[k] = a * h;
    }
    parallel_for(static_cast<int>(pde_nodes_.size()), threads, [&](int k) {
      const int l = pde_nodes_[k];
      for (int f = 0; f < ndp; ++f)
        sn_ops_[k][f] = stencils_[l].shape_weights(cloud_.pos[l] + sn_offsets_[k][f]);
    });
  }

  void build_boundary_rows() {
    for (int l = 0; l < cloud_.size(); ++l) {
      if (cloud_.kind[l] != NodeKind::boundary) continue;
      BoundaryRow row;
      row.node = l;
      row.tag = cloud_.bc[l];
      if (row.tag == BcTag::none) throw ConfigError("boundary node without BC tag");
      row.normal = cloud_.normal[l];
      row.tangent = Vec2(-row.normal.y(), row.normal.x());
      // Only rows that evaluate derivatives (traction and the tangential part
      // of free slip) collocate at the inward-shifted point; pure displacement
      // rows stay on the boundary node.
      const bool needs_derivatives = row.tag != BcTag::dirichlet;
      if (needs_derivatives) {
        // Near right-angle corners the shifted points of two adjacent segments
        // can coincide, which duplicates the stress condition there and makes
        // the local system nearly rank deficient. Back the shift off until the
        // point is separated from all previously placed ones.
        const double hl = cloud_.h[l];
        double a = cfg_.alpha_s;
        auto too_close = [&](const Vec2& q) {
          for (const BoundaryRow& other : boundary_rows_)
            if (other.tag != BcTag::dirichlet && (other.shifted - q).norm() < 0.4 * hl)
              return true;
          return false;
        };
        row.shifted = shifted_eval_point(cloud_.pos[l], row.normal, a, hl);
        for (int k = 0; k < 80 && a > 0.0 && too_close(row.shifted); ++k) {
          a *= 0.9;
          row.shifted = shifted_eval_point(cloud_.pos[l], row.normal, a, hl);
        }
        if (cfg_.alpha_s > 0.0 &&
            !domain_->contains_with_tolerance(row.shifted, 1e-9 * cloud_.h[l]))
          throw ConfigError("shifted boundary point outside domain at node " + std::to_string(l));
      } else {
        row.shifted = cloud_.pos[l];
      }
      row.ops = stencils_[l].shape_weights(row.shifted);
      const double lh = stencils_[l].support().lh;
      row.scale_u = (2.0 * mat_.mu() + mat_.lambda()) / lh;
      row.scale_t = 1.0 / lh;
      boundary_rows_.push_back(row);
    }
  }

  void add_pde_row(std::vector<Triplet>& trip, int l, const Eigen::RowVector2d& c1,
                   const Eigen::RowVector2d& c2, int col_node) const {
    trip.emplace_back(2 * l, 2 * col_node, c1(0));
    trip.emplace_back(2 * l, 2 * col_node + 1, c1(1));
    trip.emplace_back(2 * l + 1, 2 * col_node, c2(0));
    trip.emplace_back(2 * l + 1, 2 * col_node + 1, c2(1));
  }

  void assemble_direct(const StateField& s, std::vector<Triplet>& trip) const {
    for (int l : pde_nodes_) {
      const auto& nodes = stencils_[l].support().nodes;
      const auto& ops = node_ops_[l];
      const Mat4& Dl = s.D_node[l];

      // divergence of the tangent field from first-derivative weights
      Eigen::RowVector4d a1 = Eigen::RowVector4d::Zero();
      Eigen::RowVector4d a2 = Eigen::RowVector4d::Zero();
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const Mat4& Dj = s.D_node[nodes[j]];
        a1 += ops.dx(j) * Dj.row(0) + ops.dy(j) * Dj.row(3);
        a2 += ops.dx(j) * Dj.row(3) + ops.dy(j) * Dj.row(1);
      }

      for (std::size_t j = 0; j < nodes.size(); ++j) {
        Matrix42 B = strain_block(ops.dx(j), ops.dy(j));
        Matrix42 Bx = strain_block(ops.dxx(j), ops.dxy(j));
        Matrix42 By = strain_block(ops.dxy(j), ops.dyy(j));
        Eigen::RowVector2d c1 = a1 * B + Dl.row(0) * Bx + Dl.row(3) * By;
        Eigen::RowVector2d c2 = a2 * B + Dl.row(3) * Bx + Dl.row(1) * By;
        add_pde_row(trip, l, c1, c2, nodes[j]);
      }
    }
  }

  void assemble_composed(const StateField& s, std::vector<Triplet>& trip) const {
    SparseMat K_sigma, K_div;
    composed_factors(s, K_sigma, K_div);
    SparseMat K = K_div * K_sigma;
    for (int k = 0; k < K.outerSize(); ++k)
      for (SparseMat::InnerIterator it(K, k); it; ++it)
        trip.emplace_back(it.row(), it.col(), it.value());
  }

  /// Composed-approach factors, exposed for the product-identity checks.
 public:
  void composed_factors(const StateField& s, SparseMat& K_sigma, SparseMat& K_div) const {
    const int N = cloud_.size();
    std::vector<Triplet> ts, td;
    for (int l = 0; l < N; ++l) {
      const auto& nodes = stencils_[l].support().nodes;
      const auto& ops = node_ops_[l];
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        Matrix42 DB = s.D_node[l] * strain_block(ops.dx(j), ops.dy(j));
        for (int v = 0; v < 4; ++v) {
          ts.emplace_back(4 * l + v, 2 * nodes[j], DB(v, 0));
          ts.emplace_back(4 * l + v, 2 * nodes[j] + 1, DB(v, 1));
        }
      }
    }
    for (int l : pde_nodes_) {
      const auto& nodes = stencils_[l].support().nodes;
      const auto& ops = node_ops_[l];
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        td.emplace_back(2 * l, 4 * nodes[j] + 0, ops.dx(j));
        td.emplace_back(2 * l, 4 * nodes[j] + 3, ops.dy(j));
        td.emplace_back(2 * l + 1, 4 * nodes[j] + 3, ops.dx(j));
        td.emplace_back(2 * l + 1, 4 * nodes[j] + 1, ops.dy(j));
      }
    }
    K_sigma.resize(4 * N, 2 * N);
    K_div.resize(2 * N, 4 * N);
    K_sigma.setFromTriplets(ts.begin(), ts.end());
    K_div.setFromTriplets(td.begin(), td.end());
  }

 private:
  /// Central-difference combination of per-secondary-node values into a
  /// divergence at the collocation node. `value(f, comp)` returns the Voigt
  /// component `comp` at secondary node `f`.
  template <typename ValueFn>
  Vec2 fd_divergence(std::size_t k, ValueFn&& value) const {
    const double d = sn_delta_[k];
    auto ddx = [&](int comp) {
      if (cfg_.p_fd == 2) return (value(0, comp) - value(1, comp)) / (2.0 * d);
      return (-value(1, comp) + 8.0 * value(0, comp) - 8.0 * value(2, comp) + value(3, comp)) /
             (12.0 * d);
    };
    auto ddy = [&](int comp) {
      if (cfg_.p_fd == 2) return (value(2, comp) - value(3, comp)) / (2.0 * d);
      return (-value(5, comp) + 8.0 * value(4, comp) - 8.0 * value(6, comp) + value(7, comp)) /
             (12.0 * d);
    };
    return {ddx(0) + ddy(3), ddx(3) + ddy(1)};
  }

  void assemble_hybrid(const StateField& s, std::vector<Triplet>& trip) const {
    const int ndp = cfg_.n_dp();
    for (std::size_t k = 0; k < pde_nodes_.size(); ++k) {
      const int l = pde_nodes_[k];
      const auto& nodes = stencils_[l].support().nodes;
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        // Stress coefficients of support entry j at each secondary node.
        std::vector<Matrix42> Mj(ndp);
        for (int f = 0; f < ndp; ++f)
          Mj[f] = s.D_sn[k][f] * strain_block(sn_ops_[k][f].dx(j), sn_ops_[k][f].dy(j));
        Vec2 cx = fd_divergence(k, [&](int f, int comp) { return Mj[f](comp, 0); });
        Vec2 cy = fd_divergence(k, [&](int f, int comp) { return Mj[f](comp, 1); });
        add_pde_row(trip, l, Eigen::RowVector2d(cx.x(), cy.x()),
                    Eigen::RowVector2d(cx.y(), cy.y()), nodes[j]);
      }
    }
  }

  void assemble_bc_rows(const StateField& s, std::vector<Triplet>& trip) const {
    for (std::size_t b = 0; b < boundary_rows_.size(); ++b) {
      const BoundaryRow& row = boundary_rows_[b];
      const int l = row.node;
      const auto& nodes = stencils_[l].support().nodes;
      if (row.tag == BcTag::dirichlet) {
        trip.emplace_back(2 * l, 2 * l, row.scale_u);
        trip.emplace_back(2 * l + 1, 2 * l + 1, row.scale_u);
      } else if (row.tag == BcTag::traction) {
        const Mat4& Db = s.D_bnd[b];
        for (std::size_t j = 0; j < nodes.size(); ++j) {
          Matrix42 DB = Db * strain_block(row.ops.dx(j), row.ops.dy(j));
          Eigen::RowVector2d c1 = row.normal.x() * DB.row(0) + row.normal.y() * DB.row(3);
          Eigen::RowVector2d c2 = row.normal.x() * DB.row(3) + row.normal.y() * DB.row(1);
          trip.emplace_back(2 * l, 2 * nodes[j], row.scale_t * c1(0));
          trip.emplace_back(2 * l, 2 * nodes[j] + 1, row.scale_t * c1(1));
          trip.emplace_back(2 * l + 1, 2 * nodes[j], row.scale_t * c2(0));
          trip.emplace_back(2 * l + 1, 2 * nodes[j] + 1, row.scale_t * c2(1));
        }
      } else {  // free slip: u.n collocated at the node, traction row shifted
        const Mat4& Db = s.D_bnd[b];
        trip.emplace_back(2 * l, 2 * l, row.scale_u * row.normal.x());
        trip.emplace_back(2 * l, 2 * l + 1, row.scale_u * row.normal.y());
        for (std::size_t j = 0; j < nodes.size(); ++j) {
          Matrix42 DB = Db * strain_block(row.ops.dx(j), row.ops.dy(j));
          Eigen::RowVector2d tn =
              row.tangent.x() * (row.normal.x() * DB.row(0) + row.normal.y() * DB.row(3)) +
              row.tangent.y() * (row.normal.x() * DB.row(3) + row.normal.y() * DB.row(1));
          trip.emplace_back(2 * l + 1, 2 * nodes[j], row.scale_t * tn(0));
          trip.emplace_back(2 * l + 1, 2 * nodes[j] + 1, row.scale_t * tn(1));
        }
      }
    }
  }

  NodeCloud cloud_;
  const DomainSpec* domain_;
  ApproachConfig cfg_;
  MaterialModel mat_;
  CellGrid grid_;
  AugmentationBasis basis_;
  std::vector<Stencil> stencils_;
  std::vector<ShapeWeights> node_ops_;
  std::vector<int> pde_nodes_;
  std::vector<std::vector<Vec2>> sn_offsets_;        // hybrid only
  std::vector<std::vector<ShapeWeights>> sn_ops_;    // hybrid only
  std::vector<double> sn_delta_;                     // effective alpha_d * h
  std::vector<BoundaryRow> boundary_rows_;
};

}  // namespace rbffd
