#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "rbffd/types.hpp"

namespace rbffd {

/// One parameterized boundary curve. `position` maps t in [t0, t1] onto the
/// curve; `normal` returns the outward unit normal at t. Segments of a domain
/// must form a closed, counter-clockwise, non-self-intersecting loop and each
/// carries exactly one BC tag.
struct BoundarySegment {
  double t0 = 0.0;
  double t1 = 1.0;
  std::function<Vec2(double)> position;
  std::function<Vec2(double)> normal;
  BcTag tag = BcTag::none;
};

/// Parameterized 2D domain with a node density field rho(p) [nodes/m^2].
/// finalize() samples the boundary into a polyline used for point-in-domain
/// and distance-to-boundary queries.
class DomainSpec {
 public:
  std::vector<BoundarySegment> segments;
  std::function<double(const Vec2&)> density;

  void finalize(int samples_per_segment = 600) {
    polyline_.clear();
    for (const auto& seg : segments) {
      for (int i = 0; i < samples_per_segment; ++i) {
        double t = seg.t0 + (seg.t1 - seg.t0) * i / samples_per_segment;
        polyline_.push_back(seg.position(t));
      }
    }
  }

  bool finalized() const { return !polyline_.empty(); }

  /// Even-odd ray-casting test on the sampled boundary polyline.
  bool contains(const Vec2& p) const {
    bool inside = false;
    const std::size_t n = polyline_.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2& a = polyline_[i];
      const Vec2& b = polyline_[j];
      if ((a.y() > p.y()) != (b.y() > p.y())) {
        double x_cross = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
        if (p.x() < x_cross) inside = !inside;
      }
    }
    return inside;
  }

  double boundary_distance(const Vec2& p) const {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = polyline_.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      best = std::min(best, segment_distance(p, polyline_[j], polyline_[i]));
    }
    return best;
  }

  /// Inside test with a tolerance band: points within `tol` of the boundary
  /// count as inside. Used for secondary nodes and shifted boundary points
  /// that may sit on the boundary to within roundoff.
  bool contains_with_tolerance(const Vec2& p, double tol) const {
    return contains(p) || boundary_distance(p) <= tol;
  }

 private:
  static double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
  }

  std::vector<Vec2> polyline_;
};

/// Arc-length table for a boundary segment, used to place nodes at prescribed
/// arc-length fractions of curved segments.
class ArcLengthTable {
 public:
  ArcLengthTable(const BoundarySegment& seg, int samples = 2000) : seg_(&seg) {
    ts_.resize(samples + 1);
    s_.resize(samples + 1);
    s_[0] = 0.0;
    Vec2 prev = seg.position(seg.t0);
    for (int i = 0; i <= samples; ++i) {
      ts_[i] = seg.t0 + (seg.t1 - seg.t0) * i / samples;
      Vec2 cur = seg.position(ts_[i]);
      if (i > 0) s_[i] = s_[i - 1] + (cur - prev).norm();
      prev = cur;
    }
  }

  double length() const { return s_.back(); }

  /// Parameter t at arc length s (linear interpolation in the table).
  double param_at(double s) const {
    s = std::clamp(s, 0.0, length());
    auto it = std::lower_bound(s_.begin(), s_.end(), s);
    std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - s_.begin(), 1), s_.size() - 1);
    double f = (s - s_[i - 1]) / std::max(s_[i] - s_[i - 1], 1e-300);
    return ts_[i - 1] + f * (ts_[i] - ts_[i - 1]);
  }

 private:
  const BoundarySegment* seg_;
  std::vector<double> ts_;
  std::vector<double> s_;
};

}  // namespace rbffd
