#pragma once

#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "rbffd/geometry.hpp"
#include "rbffd/neighbors.hpp"

namespace rbffd {

/// Scattered node arrangement over a domain. Boundary nodes carry the outward
/// normal and BC tag of their segment; corner points never carry a node.
struct NodeCloud {
  std::vector<Vec2> pos;
  std::vector<NodeKind> kind;
  std::vector<Vec2> normal;   // zero vector for non-boundary nodes
  std::vector<BcTag> bc;      // none for non-boundary nodes
  std::vector<double> h;      // local target spacing
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(pos.size()); }

  int count(NodeKind k) const {
    int c = 0;
    for (auto v : kind)
      if (v == k) ++c;
    return c;
  }
  int n_boundary() const { return count(NodeKind::boundary); }
  /// Non-boundary nodes (interior + inner boundary); these carry PDE rows.
  int n_inner() const { return size() - n_boundary(); }

  double min_h() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : h) m = std::min(m, v);
    return m;
  }

  void push(const Vec2& p, NodeKind k, const Vec2& n, BcTag tag, double spacing) {
    pos.push_back(p);
    kind.push_back(k);
    normal.push_back(n);
    bc.push_back(tag);
    h.push_back(spacing);
  }
};

/// h = theta / sqrt(rho), theta for an ideal hexagonal lattice.
inline double spacing_from_density(double rho) {
  if (!(rho > 0.0)) throw InvalidInputError("node density must be positive");
  const double theta = std::sqrt(2.0 / std::sqrt(3.0));
  return theta / std::sqrt(rho);
}

/// Place boundary nodes along every segment, spaced ~h(p) by arc length.
/// Nodes sit at interval midpoints so segment junctions (corners) stay empty.
inline NodeCloud place_boundary_nodes(const DomainSpec& spec) {
  NodeCloud cloud;
  for (const auto& seg : spec.segments) {
    ArcLengthTable table(seg);
    const double len = table.length();
    double h_mid = spacing_from_density(spec.density(seg.position(table.param_at(len / 2))));
    int n = static_cast<int>(std::llround(len / h_mid));
    if (n < 1) {
      n = 1;
      cloud.warnings.push_back("segment shorter than local spacing; midpoint node placed");
    }
    for (int i = 0; i < n; ++i) {
      double s = (i + 0.5) * len / n;
      double t = table.param_at(s);
      Vec2 p = seg.position(t);
      cloud.push(p, NodeKind::boundary, seg.normal(t), seg.tag,
                 spacing_from_density(spec.density(p)));
    }
  }
  return cloud;
}

/// Add one inner-boundary node per boundary node at p - h*n. Candidates that
/// leave the domain or collide with an existing node are skipped.
inline void place_inner_boundary_nodes(NodeCloud& cloud, const DomainSpec& spec) {
  const int nb = cloud.size();
  for (int l = 0; l < nb; ++l) {
    if (cloud.kind[l] != NodeKind::boundary) continue;
    const double hl = cloud.h[l];
    Vec2 p = cloud.pos[l] - hl * cloud.normal[l];
    if (!spec.contains(p)) {
      cloud.warnings.push_back("inner-boundary node outside domain skipped");
      continue;
    }
    bool collides = false;
    for (int j = 0; j < cloud.size(); ++j) {
      if ((cloud.pos[j] - p).norm() < 0.5 * std::min(hl, cloud.h[j])) {
        collides = true;
        break;
      }
    }
    if (collides) {
      cloud.warnings.push_back("inner-boundary node collision skipped");
      continue;
    }
    cloud.push(p, NodeKind::inner_boundary, Vec2::Zero(), BcTag::none,
               spacing_from_density(spec.density(p)));
  }
}

namespace detail {

inline bool in_fill_region(const DomainSpec& spec, const Vec2& p, double hp) {
  return spec.contains(p) && spec.boundary_distance(p) > hp;
}

inline void bounding_box(const DomainSpec& spec, Vec2& lo, Vec2& hi) {
  lo = Vec2(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  hi = -lo;
  for (const auto& seg : spec.segments) {
    for (int i = 0; i <= 64; ++i) {
      Vec2 p = seg.position(seg.t0 + (seg.t1 - seg.t0) * i / 64.0);
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
}

}  // namespace detail

/// Fill the region inside the inner boundary by seeded dart throwing against
/// rho(p), then homogenize with damped pairwise 1/r^2 repulsion. Boundary and
/// inner-boundary nodes stay frozen; interior steps that exit the fill region
/// are pulled back inside. Deterministic for a fixed seed.
inline void fill_and_relax_interior(NodeCloud& cloud, const DomainSpec& spec,
                                    unsigned long long seed, int max_sweeps = 200) {
  std::mt19937_64 rng(seed);
  Vec2 lo, hi;
  detail::bounding_box(spec, lo, hi);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  // Monte-Carlo area of the fill region and the density ceiling.
  double rho_max = 0.0;
  long long hits = 0;
  const long long area_samples = 40000;
  for (long long i = 0; i < area_samples; ++i) {
    Vec2 p(ux(rng), uy(rng));
    double rho = spec.density(p);
    double hp = spacing_from_density(rho);
    if (detail::in_fill_region(spec, p, hp)) {
      ++hits;
      rho_max = std::max(rho_max, rho);
    }
  }
  const double box_area = (hi - lo).prod();
  const double region_area = box_area * static_cast<double>(hits) / area_samples;
  if (hits == 0 || rho_max == 0.0) return;  // domain thinner than 2h: no interior nodes

  double rho_bar = 0.0;  // average density over the region for the target count
  {
    std::mt19937_64 rng2(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> vx(lo.x(), hi.x()), vy(lo.y(), hi.y());
    long long cnt = 0;
    for (long long i = 0; i < area_samples; ++i) {
      Vec2 p(vx(rng2), vy(rng2));
      double hp = spacing_from_density(spec.density(p));
      if (detail::in_fill_region(spec, p, hp)) {
        rho_bar += spec.density(p);
        ++cnt;
      }
    }
    rho_bar /= std::max<long long>(cnt, 1);
  }
  const int target = static_cast<int>(std::llround(rho_bar * region_area));
  if (target <= 0) return;

  // Dart throwing with a 0.7 h exclusion radius against all existing nodes.
  const double h_ref = spacing_from_density(rho_max);
  std::vector<Vec2> accepted;
  long long attempts = 0;
  const long long max_attempts = std::max<long long>(400LL * target, 200000);
  while (static_cast<int>(accepted.size()) < target && attempts < max_attempts) {
    ++attempts;
    Vec2 p(ux(rng), uy(rng));
    double rho = spec.density(p);
    if (u01(rng) > rho / rho_max) continue;
    double hp = spacing_from_density(rho);
    if (!detail::in_fill_region(spec, p, hp)) continue;
    bool ok = true;
    for (int j = 0; j < cloud.size() && ok; ++j)
      if ((cloud.pos[j] - p).squaredNorm() < 0.49 * hp * hp) ok = false;
    for (const auto& q : accepted)
      if ((q - p).squaredNorm() < 0.49 * hp * hp) {
        ok = false;
        break;
      }
    if (ok) accepted.push_back(p);
  }
  if (static_cast<int>(accepted.size()) < target) {
    cloud.warnings.push_back("interior fill reached attempt limit below target count");
  }

  const int first_interior = cloud.size();
  for (const auto& p : accepted) {
    cloud.push(p, NodeKind::interior, Vec2::Zero(), BcTag::none,
               spacing_from_density(spec.density(p)));
  }

  // Repulsion relaxation: force ~ 1/r^2 truncated at 3h, step capped at 0.2h,
  // stop when the largest displacement falls below 0.01h.
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    CellGrid grid(cloud.pos, 1.5 * h_ref);
    double max_move = 0.0;
    for (int l = first_interior; l < cloud.size(); ++l) {
      const double hl = cloud.h[l];
      Vec2 force = Vec2::Zero();
      for (int j : grid.radius_query(cloud.pos[l], 3.0 * hl)) {
        if (j == l) continue;
        Vec2 d = cloud.pos[l] - cloud.pos[j];
        double r = d.norm();
        if (r < 1e-14 * hl) continue;
        force += (d / r) * (hl * hl) / (r * r);
      }
      Vec2 step = 0.05 * hl * force;
      double mag = step.norm();
      if (mag > 0.2 * hl) step *= 0.2 * hl / mag;
      Vec2 cand = cloud.pos[l] + step;
      // Reproject: bisect back toward the old position until inside the region.
      for (int b = 0; b < 24 && !detail::in_fill_region(spec, cand, hl); ++b)
        cand = 0.5 * (cand + cloud.pos[l]);
      if (!detail::in_fill_region(spec, cand, hl)) cand = cloud.pos[l];
      max_move = std::max(max_move, (cand - cloud.pos[l]).norm() / hl);
      cloud.pos[l] = cand;
    }
    if (max_move < 0.01) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    cloud.warnings.push_back("interior relaxation hit the sweep limit; best state kept");
  }
}

/// Full generation pipeline for a finalized DomainSpec.
inline NodeCloud generate_nodes(const DomainSpec& spec, unsigned long long seed) {
  NodeCloud cloud = place_boundary_nodes(spec);
  place_inner_boundary_nodes(cloud, spec);
  fill_and_relax_interior(cloud, spec, seed);
  return cloud;
}

/// One row per node: `x y kind nx ny bc_tag`, 17 significant digits.
inline void write_nodes(std::ostream& os, const NodeCloud& cloud) {
  char buf[128];
  for (int l = 0; l < cloud.size(); ++l) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %s %.17g %.17g %s\n", cloud.pos[l].x(),
                  cloud.pos[l].y(), to_string(cloud.kind[l]), cloud.normal[l].x(),
                  cloud.normal[l].y(), to_string(cloud.bc[l]));
    os << buf;
  }
}

}  // namespace rbffd
