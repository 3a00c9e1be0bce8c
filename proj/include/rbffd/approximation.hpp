#pragma once

#include <array>

#include "rbffd/neighbors.hpp"
#include "rbffd/node_cloud.hpp"

namespace rbffd {

/// Support domain of a collocation node: the node itself plus its lN-1
/// nearest neighbors, with the RMS distance scale lh.
struct SupportDomain {
  int center = -1;
  std::vector<int> nodes;  // nearest-first, nodes[0] == center
  double lh = 0.0;
};

inline SupportDomain build_support(const NodeCloud& cloud, const CellGrid& grid, int l,
                                   int support_size) {
  if (support_size > cloud.size())
    throw ConfigError("support size exceeds node count");
  SupportDomain s;
  s.center = l;
  s.nodes = grid.k_nearest(cloud.pos[l], support_size);
  if (s.nodes.empty() || s.nodes[0] != l) {
    // Duplicate positions could displace the center from the front; the cloud
    // invariant forbids duplicates, so only reorder the exact self hit.
    auto it = std::find(s.nodes.begin(), s.nodes.end(), l);
    if (it == s.nodes.end()) throw ConfigError("support does not contain its center");
    std::iter_swap(s.nodes.begin(), it);
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < s.nodes.size(); ++i)
    sum += (cloud.pos[s.nodes[i]] - cloud.pos[l]).squaredNorm();
  s.lh = std::sqrt(sum / std::max<std::size_t>(s.nodes.size() - 1, 1));
  return s;
}

/// Monomial exponents up to total degree p in two dimensions, graded order.
struct AugmentationBasis {
  int degree = 0;
  std::vector<std::array<int, 2>> exponents;

  static AugmentationBasis make(int p) {
    AugmentationBasis b;
    b.degree = p;
    for (int d = 0; d <= p; ++d)
      for (int i = 0; i <= d; ++i) b.exponents.push_back({d - i, i});
    return b;
  }

  int M() const { return static_cast<int>(exponents.size()); }
};

/// PHS value (r/lh)^m with odd order m.
inline double phs_value(double r, double lh, int m) {
  if (m % 2 == 0) throw ConfigError("PHS order must be odd");
  if (!(lh > 0.0)) throw InvalidInputError("PHS scale must be positive");
  if (r < 0.0) throw InvalidInputError("PHS radius must be nonnegative");
  return std::pow(r / lh, m);
}

/// Linear differential operator with constant coefficients up to 2nd order.
struct DiffOp {
  double id = 0, dx = 0, dy = 0, dxx = 0, dxy = 0, dyy = 0;

  static DiffOp identity() { return {1, 0, 0, 0, 0, 0}; }
  static DiffOp ddx() { return {0, 1, 0, 0, 0, 0}; }
  static DiffOp ddy() { return {0, 0, 1, 0, 0, 0}; }
  static DiffOp laplacian() { return {0, 0, 0, 1, 0, 1}; }
};

namespace detail {

/// Analytic derivatives of the scaled PHS centered at c, evaluated at x.
/// All derivatives up to 2nd order vanish at r = 0 for m >= 3.
inline void phs_derivs(const Vec2& x, const Vec2& c, double lh, int m, double out[6]) {
  const Vec2 d = x - c;
  const double r = d.norm();
  const double s = std::pow(lh, -m);
  if (r < 1e-300) {
    for (int i = 0; i < 6; ++i) out[i] = 0.0;
    return;
  }
  const double rm2 = std::pow(r, m - 2);
  const double rm4 = std::pow(r, m - 4);
  out[0] = std::pow(r, m) * s;                         // value
  out[1] = m * rm2 * d.x() * s;                        // dx
  out[2] = m * rm2 * d.y() * s;                        // dy
  out[3] = (m * rm2 + m * (m - 2) * rm4 * d.x() * d.x()) * s;  // dxx
  out[4] = m * (m - 2) * rm4 * d.x() * d.y() * s;              // dxy
  out[5] = (m * rm2 + m * (m - 2) * rm4 * d.y() * d.y()) * s;  // dyy
}

/// Derivatives of the shifted/scaled monomial ((x-c)/lh)^e1 ((y-c)/lh)^e2.
inline void monomial_derivs(const Vec2& x, const Vec2& c, double lh, int e1, int e2,
                            double out[6]) {
  const double px = (x.x() - c.x()) / lh;
  const double py = (x.y() - c.y()) / lh;
  auto pw = [](double v, int e) { return e < 0 ? 0.0 : std::pow(v, e); };
  const double inv = 1.0 / lh;
  out[0] = pw(px, e1) * pw(py, e2);
  out[1] = e1 * pw(px, e1 - 1) * pw(py, e2) * inv;
  out[2] = e2 * pw(px, e1) * pw(py, e2 - 1) * inv;
  out[3] = e1 * (e1 - 1) * pw(px, e1 - 2) * pw(py, e2) * inv * inv;
  out[4] = e1 * e2 * pw(px, e1 - 1) * pw(py, e2 - 1) * inv * inv;
  out[5] = e2 * (e2 - 1) * pw(px, e1) * pw(py, e2 - 2) * inv * inv;
}

inline double apply_op(const DiffOp& op, const double d[6]) {
  return op.id * d[0] + op.dx * d[1] + op.dy * d[2] + op.dxx * d[3] + op.dxy * d[4] +
         op.dyy * d[5];
}

}  // namespace detail

/// Augmented interpolation matrix [Phi P; P^T 0] for one support domain.
inline Eigen::MatrixXd assemble_interpolation_matrix(const NodeCloud& cloud,
                                                     const SupportDomain& sup,
                                                     const AugmentationBasis& basis, int m) {
  const int n = static_cast<int>(sup.nodes.size());
  const int M = basis.M();
  if (n < M) throw ConfigError("support smaller than augmentation basis");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + M, n + M);
  const Vec2 c = cloud.pos[sup.center];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double v = phs_value((cloud.pos[sup.nodes[i]] - cloud.pos[sup.nodes[j]]).norm(),
                           sup.lh, m);
      A(i, j) = v;
      A(j, i) = v;
    }
    for (int k = 0; k < M; ++k) {
      double d[6];
      detail::monomial_derivs(cloud.pos[sup.nodes[i]], c, sup.lh, basis.exponents[k][0],
                              basis.exponents[k][1], d);
      A(i, n + k) = d[0];
      A(n + k, i) = d[0];
    }
  }
  return A;
}

/// Weight vectors of the six elementary operators at one evaluation point.
struct ShapeWeights {
  Eigen::VectorXd id, dx, dy, dxx, dxy, dyy;
};

/// Factorized local interpolation system of one node; produces operator
/// weights at arbitrary evaluation points.
class Stencil {
 public:
  Stencil(const NodeCloud& cloud, SupportDomain sup, AugmentationBasis basis, int m)
      : cloud_(&cloud), sup_(std::move(sup)), basis_(std::move(basis)), m_(m) {
    Eigen::MatrixXd A = assemble_interpolation_matrix(cloud, sup_, basis_, m_);
    norm_ = A.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm for rcond
    lu_.compute(A);
    if (norm_ == 0.0 || lu_.rcond() < 1e-14) throw SingularStencilError(sup_.center);
  }

  const SupportDomain& support() const { return sup_; }
  int phs_order() const { return m_; }
  const AugmentationBasis& basis() const { return basis_; }

  /// Weights over the support nodes for applying `op` at `x`.
  Eigen::VectorXd weights(const DiffOp& op, const Vec2& x) const {
    Eigen::VectorXd b = rhs(op, x);
    Eigen::VectorXd w = lu_.solve(b);
    return w.head(sup_.nodes.size());
  }

  ShapeWeights shape_weights(const Vec2& x) const {
    const int n = static_cast<int>(sup_.nodes.size());
    const int M = basis_.M();
    Eigen::MatrixXd B(n + M, 6);
    const Vec2 c = cloud_->pos[sup_.center];
    double d[6];
    for (int i = 0; i < n; ++i) {
      detail::phs_derivs(x, cloud_->pos[sup_.nodes[i]], sup_.lh, m_, d);
      for (int k = 0; k < 6; ++k) B(i, k) = d[k];
    }
    for (int j = 0; j < M; ++j) {
      detail::monomial_derivs(x, c, sup_.lh, basis_.exponents[j][0], basis_.exponents[j][1],
                              d);
      for (int k = 0; k < 6; ++k) B(n + j, k) = d[k];
    }
    Eigen::MatrixXd W = lu_.solve(B);
    ShapeWeights out;
    out.id = W.col(0).head(n);
    out.dx = W.col(1).head(n);
    out.dy = W.col(2).head(n);
    out.dxx = W.col(3).head(n);
    out.dxy = W.col(4).head(n);
    out.dyy = W.col(5).head(n);
    return out;
  }

 private:
  Eigen::VectorXd rhs(const DiffOp& op, const Vec2& x) const {
    const int n = static_cast<int>(sup_.nodes.size());
    const int M = basis_.M();
    Eigen::VectorXd b(n + M);
    double d[6];
    for (int i = 0; i < n; ++i) {
      detail::phs_derivs(x, cloud_->pos[sup_.nodes[i]], sup_.lh, m_, d);
      b(i) = detail::apply_op(op, d);
    }
    for (int j = 0; j < M; ++j) {
      detail::monomial_derivs(x, cloud_->pos[sup_.center], sup_.lh, basis_.exponents[j][0],
                              basis_.exponents[j][1], d);
      b(n + j) = detail::apply_op(op, d);
    }
    return b;
  }

  const NodeCloud* cloud_;
  SupportDomain sup_;
  AugmentationBasis basis_;
  int m_;
  double norm_ = 0.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// operator_weights of the module contract: weights of a linear differential
/// operator at an arbitrary evaluation point over one support domain.
inline Eigen::VectorXd operator_weights(const NodeCloud& cloud, const SupportDomain& sup,
                                        const AugmentationBasis& basis, int m,
                                        const DiffOp& op, const Vec2& eval_point) {
  return Stencil(cloud, sup, basis, m).weights(op, eval_point);
}

}  // namespace rbffd
