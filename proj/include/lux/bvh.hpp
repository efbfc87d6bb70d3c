// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "lux/scene.hpp"

namespace lux {

// Axis-aligned BVH over the scene's patch triangles. Supports boolean
// segment occlusion (with per-query excluded patch ids) and closest-hit
// queries for the virtual luxmeter.
class VisibilityIndex {
 public:
  struct Hit {
    int patch_id = -1;
    double t = std::numeric_limits<double>::infinity();
  };

  VisibilityIndex() = default;

  explicit VisibilityIndex(const Scene& scene) {
    for (const Patch& p : scene.patches) {
      push_tri(p.vertices[0], p.vertices[1], p.vertices[2], p.id);
      if (p.vertices.size() == 4) push_tri(p.vertices[0], p.vertices[2], p.vertices[3], p.id);
    }
    build();
  }

  explicit VisibilityIndex(const std::vector<Patch>& patches) {
    for (const Patch& p : patches) {
      push_tri(p.vertices[0], p.vertices[1], p.vertices[2], p.id);
      if (p.vertices.size() == 4) push_tri(p.vertices[0], p.vertices[2], p.vertices[3], p.id);
    }
    build();
  }

  bool empty() const { return tris_.empty(); }

  // True iff the open segment (p, q) hits a non-excluded patch.
  bool segment_occluded(const Vec3& p, const Vec3& q, int exclude_a = -1,
                        int exclude_b = -1) const {
    if (tris_.empty()) return false;
    const Vec3 dir = q - p;
    constexpr double t_eps = 1e-9;
    return traverse(p, dir, 1.0 - t_eps, exclude_a, exclude_b, nullptr, /*any_hit=*/true)
        .has_value();
  }

  bool segment_occluded_set(const Vec3& p, const Vec3& q,
                            const std::vector<int>& exclude) const {
    if (tris_.empty()) return false;
    const Vec3 dir = q - p;
    return traverse(p, dir, 1.0 - 1e-9, -1, -1, &exclude, /*any_hit=*/true).has_value();
  }

  // Closest intersection along p + t*dir for t in (eps, t_max).
  std::optional<Hit> first_hit(const Vec3& origin, const Vec3& dir,
                               double t_max = std::numeric_limits<double>::infinity(),
                               int exclude_a = -1, int exclude_b = -1) const {
    if (tris_.empty()) return std::nullopt;
    return traverse(origin, dir, t_max, exclude_a, exclude_b, nullptr, /*any_hit=*/false);
  }

 private:
  struct Tri {
    Vec3 v0, e1, e2;
    int patch_id;
  };
  struct Node {
    Vec3 lo, hi;
    int left = -1;   // index of left child; right = left + 1
    int first = 0;   // leaf: first tri index
    int count = 0;   // leaf: tri count (0 for interior)
  };

  void push_tri(const Vec3& a, const Vec3& b, const Vec3& c, int id) {
    tris_.push_back({a, b - a, c - a, id});
  }

  void build() {
    if (tris_.empty()) return;
    order_.resize(tris_.size());
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.reserve(2 * tris_.size());
    build_node(0, static_cast<int>(tris_.size()));
  }

  int build_node(int first, int count) {
    const int idx = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (int k = first; k < first + count; ++k) {
      const Tri& t = tris_[order_[k]];
      for (const Vec3 v : {t.v0, Vec3(t.v0 + t.e1), Vec3(t.v0 + t.e2)}) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
    }
    nodes_[idx].lo = lo;
    nodes_[idx].hi = hi;
    if (count <= 4) {
      nodes_[idx].first = first;
      nodes_[idx].count = count;
      return idx;
    }
    int axis;
    (hi - lo).maxCoeff(&axis);
    const int mid = first + count / 2;
    std::nth_element(order_.begin() + first, order_.begin() + mid,
                     order_.begin() + first + count, [this, axis](int a, int b) {
                       return tri_center(a, axis) < tri_center(b, axis);
                     });
    const int left = build_node(first, mid - first);
    const int right = build_node(mid, first + count - mid);
    nodes_[idx].left = left;
    nodes_[idx].first = right;  // interior nodes reuse `first` for the right child
    nodes_[idx].count = 0;
    return idx;
  }

  double tri_center(int t, int axis) const {
    const Tri& tr = tris_[t];
    return tr.v0[axis] + (tr.e1[axis] + tr.e2[axis]) / 3.0;
  }

  static bool box_hit(const Node& n, const Vec3& o, const Vec3& inv_d, double t_max) {
    double t0 = 0.0, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
      double ta = (n.lo[a] - o[a]) * inv_d[a];
      double tb = (n.hi[a] - o[a]) * inv_d[a];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
    return true;
  }

  std::optional<Hit> traverse(const Vec3& o, const Vec3& d, double t_max, int ex_a,
                              int ex_b, const std::vector<int>* ex_set,
                              bool any_hit) const {
    const Vec3 inv_d(1.0 / d.x(), 1.0 / d.y(), 1.0 / d.z());
    Hit best;
    best.t = t_max;
    bool found = false;
    int stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
      const Node& node = nodes_[stack[--sp]];
      if (!box_hit(node, o, inv_d, best.t)) continue;
      if (node.count > 0) {
        for (int k = node.first; k < node.first + node.count; ++k) {
          const Tri& tr = tris_[order_[k]];
          if (tr.patch_id == ex_a || tr.patch_id == ex_b) continue;
          if (ex_set && std::find(ex_set->begin(), ex_set->end(), tr.patch_id) != ex_set->end())
            continue;
          double t;
          if (intersect_tri(tr, o, d, best.t, t)) {
            best.t = t;
            best.patch_id = tr.patch_id;
            found = true;
            if (any_hit) return best;
          }
        }
      } else {
        stack[sp++] = node.left;
        stack[sp++] = node.first;  // right child
      }
    }
    if (found) return best;
    return std::nullopt;
  }

  // Moller-Trumbore, double precision, open interval (eps, t_limit).
  static bool intersect_tri(const Tri& tr, const Vec3& o, const Vec3& d, double t_limit,
                            double& t_out) {
    constexpr double eps = 1e-12;
    const Vec3 pvec = d.cross(tr.e2);
    const double det = tr.e1.dot(pvec);
    if (std::abs(det) < eps) return false;
    const double inv_det = 1.0 / det;
    const Vec3 tvec = o - tr.v0;
    const double u = tvec.dot(pvec) * inv_det;
    if (u < 0.0 || u > 1.0) return false;
    const Vec3 qvec = tvec.cross(tr.e1);
    const double v = d.dot(qvec) * inv_det;
    if (v < 0.0 || u + v > 1.0) return false;
    const double t = tr.e2.dot(qvec) * inv_det;
    if (t <= 1e-9 || t >= t_limit) return false;
    t_out = t;
    return true;
  }

  std::vector<Tri> tris_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

// True iff the open segment (p, q) intersects no non-excluded patch.
inline bool visibility(const Vec3& p, const Vec3& q, const VisibilityIndex& index,
                       const std::vector<int>& exclude = {}) {
  if (p == q) throw ValidationError("visibility endpoints coincide");
  if (exclude.size() <= 2) {
    const int a = exclude.size() > 0 ? exclude[0] : -1;
    const int b = exclude.size() > 1 ? exclude[1] : -1;
    return !index.segment_occluded(p, q, a, b);
  }
  return !index.segment_occluded_set(p, q, exclude);
}

}  // namespace lux
