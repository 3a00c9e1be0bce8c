#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace rbffd {

using Vec2 = Eigen::Vector2d;
using Voigt4 = Eigen::Vector4d;   // (11, 22, 33, 12); strains use engineering shear
using Mat4 = Eigen::Matrix4d;
using Matrix42 = Eigen::Matrix<double, 4, 2>;

enum class NodeKind { boundary, inner_boundary, interior };
enum class BcTag { none, dirichlet, traction, free_slip };
enum class PlaneMode { plane_strain, plane_stress };
enum class Approach { direct, composed, hybrid };

struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a local interpolation system is numerically rank deficient.
struct SingularStencilError : std::runtime_error {
  int node;
  explicit SingularStencilError(int node_index)
      : std::runtime_error("singular stencil at node " + std::to_string(node_index)),
        node(node_index) {}
};

/// Raised when the scalar return-mapping iteration fails at a material point.
struct MaterialError : std::runtime_error {
  int point;
  MaterialError(const std::string& what, int point_index)
      : std::runtime_error(what + " (point " + std::to_string(point_index) + ")"),
        point(point_index) {}
};

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::boundary: return "boundary";
    case NodeKind::inner_boundary: return "inner_boundary";
    default: return "interior";
  }
}

inline const char* to_string(BcTag t) {
  switch (t) {
    case BcTag::dirichlet: return "dirichlet";
    case BcTag::traction: return "traction";
    case BcTag::free_slip: return "free_slip";
    default: return "none";
  }
}

inline const char* to_string(Approach a) {
  switch (a) {
    case Approach::direct: return "direct";
    case Approach::composed: return "composed";
    default: return "hybrid";
  }
}

}  // namespace rbffd
