#pragma once

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "rbffd/types.hpp"

namespace rbffd {

/// Uniform-cell spatial index for radius and k-nearest queries on a fixed
/// point set. Cell size should be on the order of the node spacing.
class CellGrid {
 public:
  CellGrid() = default;

  CellGrid(const std::vector<Vec2>& points, double cell_size)
      : points_(&points), cell_(cell_size) {
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
      cells_[key(points[i])].push_back(i);
    }
  }

  std::vector<int> radius_query(const Vec2& p, double radius) const {
    std::vector<int> out;
    const double r2 = radius * radius;
    int cx0 = cell_index(p.x() - radius), cx1 = cell_index(p.x() + radius);
    int cy0 = cell_index(p.y() - radius), cy1 = cell_index(p.y() + radius);
    for (int cx = cx0; cx <= cx1; ++cx) {
      for (int cy = cy0; cy <= cy1; ++cy) {
        auto it = cells_.find(pack(cx, cy));
        if (it == cells_.end()) continue;
        for (int i : it->second) {
          if (((*points_)[i] - p).squaredNorm() <= r2) out.push_back(i);
        }
      }
    }
    return out;
  }

  /// Indices of the k nearest points to p, nearest first. Ties broken by index.
  std::vector<int> k_nearest(const Vec2& p, int k) const {
    double radius = 2.0 * cell_;
    for (;;) {
      auto found = radius_query(p, radius);
      if (static_cast<int>(found.size()) >= k || found.size() == points_->size()) {
        std::sort(found.begin(), found.end(), [&](int a, int b) {
          double da = ((*points_)[a] - p).squaredNorm();
          double db = ((*points_)[b] - p).squaredNorm();
          return da != db ? da < db : a < b;
        });
        if (static_cast<int>(found.size()) > k) found.resize(k);
        // A point just outside the search radius can still be closer than the
        // k-th hit; grow once more unless the k-th distance fits the radius.
        if (static_cast<int>(found.size()) < k ||
            ((*points_)[found.back()] - p).norm() <= radius ||
            found.size() == points_->size()) {
          return found;
        }
      }
      radius *= 2.0;
    }
  }

 private:
  int cell_index(double x) const { return static_cast<int>(std::floor(x / cell_)); }
  long long pack(int cx, int cy) const {
    return (static_cast<long long>(cx) << 32) ^ (static_cast<unsigned int>(cy));
  }
  long long key(const Vec2& p) const { return pack(cell_index(p.x()), cell_index(p.y())); }

  const std::vector<Vec2>* points_ = nullptr;
  double cell_ = 1.0;
  std::unordered_map<long long, std::vector<int>> cells_;
};

}  // namespace rbffd
