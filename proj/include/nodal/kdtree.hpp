#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "nodal/common.hpp"

namespace nodal {

// Static kd-tree over R^3 points with optional per-axis periodicity
// (period <= 0 means the axis is ordinary Euclidean). Periodic inputs must
// be canonicalized into [0, period). Used for nearest-zero queries and for
// bucketing nodal pieces; exact as long as query radii stay below half the
// period, which wavelength-scale radii always do.
class KdTree {
 public:
  KdTree() = default;

  KdTree(std::vector<Vec3> pts, std::array<double, 3> periods = {0, 0, 0})
      : pts_(std::move(pts)), periods_(periods) {
    ids_.resize(pts_.size());
    std::iota(ids_.begin(), ids_.end(), 0u);
    nodes_.reserve(pts_.size());
    if (!pts_.empty()) root_ = build(0, static_cast<int>(pts_.size()));
  }

  std::size_t size() const { return pts_.size(); }

  // Nearest point; returns (distance, original index).
  std::pair<double, std::uint32_t> nearest(const Vec3& query) const {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_id = 0;
    search(root_, query, best, best_id);
    return {std::sqrt(best), best_id};
  }

  std::vector<std::uint32_t> radius(const Vec3& query, double r) const {
    std::vector<std::uint32_t> out;
    radius_search(root_, query, r * r, out);
    return out;
  }

 private:
  struct Node {
    Vec3 lo, hi;
    std::int32_t left = -1, right = -1;
    std::int32_t begin = 0, end = 0;  // leaf range into ids_
  };

  static constexpr int kLeaf = 16;

  std::int32_t build(int begin, int end) {
    Node node;
    node.lo = {1e300, 1e300, 1e300};
    node.hi = {-1e300, -1e300, -1e300};
    for (int i = begin; i < end; ++i) {
      const Vec3& p = pts_[ids_[i]];
      for (int a = 0; a < 3; ++a) {
        node.lo[a] = std::min(node.lo[a], p[a]);
        node.hi[a] = std::max(node.hi[a], p[a]);
      }
    }
    std::int32_t id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= kLeaf) {
      nodes_[id].begin = begin;
      nodes_[id].end = end;
      return id;
    }
    int axis = 0;
    double extent = node.hi[0] - node.lo[0];
    for (int a = 1; a < 3; ++a) {
      double e = node.hi[a] - node.lo[a];
      if (e > extent) {
        extent = e;
        axis = a;
      }
    }
    int mid = (begin + end) / 2;
    std::nth_element(ids_.begin() + begin, ids_.begin() + mid,
                     ids_.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
                       if (pts_[a][axis] != pts_[b][axis])
                         return pts_[a][axis] < pts_[b][axis];
                       return a < b;
                     });
    std::int32_t l = build(begin, mid);
    std::int32_t r = build(mid, end);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  double axis_dist2(double x, double lo, double hi, double period) const {
    double d;
    if (x < lo)
      d = lo - x;
    else if (x > hi)
      d = x - hi;
    else
      return 0.0;
    if (period > 0) {
      // the nearest image may wrap around
      double alt = (x < lo) ? (x + period - hi) : (lo + period - x);
      if (alt < 0) alt = 0;
      d = std::min(d, alt);
    }
    return d * d;
  }

  double point_dist2(const Vec3& a, const Vec3& b) const {
    double s = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
      double d = std::abs(a[ax] - b[ax]);
      if (periods_[ax] > 0) d = std::min(d, periods_[ax] - d);
      s += d * d;
    }
    return s;
  }

  double box_dist2(const Node& n, const Vec3& q) const {
    double s = 0.0;
    for (int a = 0; a < 3; ++a)
      s += axis_dist2(q[a], n.lo[a], n.hi[a], periods_[a]);
    return s;
  }

  void search(std::int32_t ni, const Vec3& q, double& best,
              std::uint32_t& best_id) const {
    const Node& n = nodes_[ni];
    if (box_dist2(n, q) >= best) return;
    if (n.left < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        double d2 = point_dist2(pts_[ids_[i]], q);
        if (d2 < best) {
          best = d2;
          best_id = ids_[i];
        }
      }
      return;
    }
    double dl = box_dist2(nodes_[n.left], q);
    double dr = box_dist2(nodes_[n.right], q);
    if (dl <= dr) {
      search(n.left, q, best, best_id);
      if (dr < best) search(n.right, q, best, best_id);
    } else {
      search(n.right, q, best, best_id);
      if (dl < best) search(n.left, q, best, best_id);
    }
  }

  void radius_search(std::int32_t ni, const Vec3& q, double r2,
                     std::vector<std::uint32_t>& out) const {
    if (ni < 0) return;
    const Node& n = nodes_[ni];
    if (box_dist2(n, q) > r2) return;
    if (n.left < 0) {
      for (int i = n.begin; i < n.end; ++i)
        if (point_dist2(pts_[ids_[i]], q) <= r2) out.push_back(ids_[i]);
      return;
    }
    radius_search(n.left, q, r2, out);
    radius_search(n.right, q, r2, out);
  }

  std::vector<Vec3> pts_;
  std::array<double, 3> periods_{0, 0, 0};
  std::vector<std::uint32_t> ids_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace nodal
