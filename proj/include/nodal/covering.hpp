#pragma once

#include <unordered_map>

#include "nodal/eigenmodes.hpp"
#include "nodal/kdtree.hpp"

namespace nodal {

// ===========================================================================
// Wavelength-scale ball covers: a greedy maximal packing over quadrature
// points in ascending index order. Maximality makes the radius-r balls a
// cover; double-ball overlap multiplicities certify the constant C_M.
// ===========================================================================
struct BallCover {
  double radius = 0.0;
  std::vector<std::uint32_t> center_ids;
  std::vector<Vec3> centers;
  std::vector<std::int64_t> multiplicity_histogram;  // index = multiplicity
  int max_multiplicity = 0;
};

namespace detail {

// Bucketed "is any accepted center within r" test; buckets keyed per layout.
class CenterIndex {
 public:
  CenterIndex(const ManifoldModel& m, double r) : m_(m), r_(r) {
    if (m.kind() == ManifoldKind::FlatTorus) {
      for (int a = 0; a < m.dimension(); ++a) {
        int n = std::max(1, static_cast<int>(m.periods()[a] / r));
        ncell_[a] = n;
        cell_[a] = m.periods()[a] / n;
      }
    }
  }

  bool near(const Vec3& p) const {
    switch (m_.kind()) {
      case ManifoldKind::FlatTorus: {
        int n = m_.dimension();
        std::array<int, 3> c{};
        for (int a = 0; a < n; ++a)
          c[a] = std::min(static_cast<int>(p[a] / cell_[a]), ncell_[a] - 1);
        std::array<int, 3> d{};
        int lo2 = (n == 3) ? -1 : 0, hi2 = (n == 3) ? 1 : 0;
        for (d[0] = -1; d[0] <= 1; ++d[0])
          for (d[1] = -1; d[1] <= 1; ++d[1])
            for (d[2] = lo2; d[2] <= hi2; ++d[2]) {
              std::uint64_t key = hash_cell(c, d, n);
              auto it = buckets_.find(key);
              if (it == buckets_.end()) continue;
              for (const Vec3& q : it->second)
                if (m_.distance(p, q) < r_) return true;
            }
        return false;
      }
      case ManifoldKind::RoundSphere: {
        double th = std::acos(std::clamp(p.z, -1.0, 1.0));
        int b = band(th);
        for (int bb = b - 1; bb <= b + 1; ++bb) {
          auto it = buckets_.find(static_cast<std::uint64_t>(bb + 1));
          if (it == buckets_.end()) continue;
          double cr = std::cos(r_);
          for (const Vec3& q : it->second)
            if (dot(p, q) > cr) return true;
        }
        return false;
      }
      case ManifoldKind::MeshSurface: {
        double r2 = r_ * r_;
        for (const Vec3& q : flat_) {
          Vec3 d = p - q;
          if (dot(d, d) < r2) return true;
        }
        return false;
      }
    }
    return false;
  }

  void insert(const Vec3& p) {
    switch (m_.kind()) {
      case ManifoldKind::FlatTorus: {
        int n = m_.dimension();
        std::array<int, 3> c{};
        for (int a = 0; a < n; ++a)
          c[a] = std::min(static_cast<int>(p[a] / cell_[a]), ncell_[a] - 1);
        buckets_[hash_cell(c, {0, 0, 0}, n)].push_back(p);
        break;
      }
      case ManifoldKind::RoundSphere: {
        double th = std::acos(std::clamp(p.z, -1.0, 1.0));
        buckets_[static_cast<std::uint64_t>(band(th) + 1)].push_back(p);
        break;
      }
      case ManifoldKind::MeshSurface:
        flat_.push_back(p);
        break;
    }
  }

 private:
  int band(double theta) const { return static_cast<int>(theta / r_); }

  std::uint64_t hash_cell(std::array<int, 3> c, std::array<int, 3> d,
                          int n) const {
    std::uint64_t key = 0;
    for (int a = 0; a < n; ++a) {
      int v = (c[a] + d[a] + ncell_[a]) % ncell_[a];
      key = key * 73856093u + static_cast<std::uint64_t>(v + 1);
    }
    return key;
  }

  const ManifoldModel& m_;
  double r_;
  std::array<int, 3> ncell_{1, 1, 1};
  std::array<double, 3> cell_{1, 1, 1};
  std::unordered_map<std::uint64_t, std::vector<Vec3>> buckets_;
  std::vector<Vec3> flat_;
};

}  // namespace detail

// Greedy maximal packing in ascending point-index order: a point becomes a
// center iff it is at distance >= r from every accepted center.
inline BallCover build_cover(const ManifoldModel& m, const Quadrature& q,
                             double r) {
  if (!(r > 0) || r > 2.0 * m.diameter())
    throw domain_error("cover radius must satisfy 0 < r <= 2*diameter");
  if (q.spacing >= r / 4.0)
    throw resolution_error(
        "grid spacing must be < r/4 for a meaningful covering certificate");
  BallCover cover;
  cover.radius = r;
  detail::CenterIndex index(m, r);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vec3& p = q.points[i];
    if (index.near(p)) continue;
    index.insert(p);
    cover.center_ids.push_back(static_cast<std::uint32_t>(i));
    cover.centers.push_back(p);
  }
  return cover;
}

// Count, for every quadrature point, how many double balls 2B_i contain it.
// Fills the histogram and max multiplicity on the cover and returns the max.
inline int overlap_multiplicity(const ManifoldModel& m, const Quadrature& q,
                                BallCover& cover) {
  std::vector<std::int32_t> counts(q.size(), 0);
  for (const Vec3& c : cover.centers)
    ball_visit(m, q, c, 2.0 * cover.radius,
               [&counts](std::size_t i) { ++counts[i]; });
  int maxm = 0;
  for (auto c : counts) maxm = std::max(maxm, c);
  cover.multiplicity_histogram.assign(maxm + 1, 0);
  for (auto c : counts) ++cover.multiplicity_histogram[c];
  cover.max_multiplicity = maxm;
  return maxm;
}

// Certify that every quadrature point lies within `radius` of some center.
inline bool covering_certificate(const ManifoldModel& m, const Quadrature& q,
                                 const BallCover& cover) {
  std::vector<char> covered(q.size(), 0);
  for (const Vec3& c : cover.centers)
    ball_visit(m, q, c, cover.radius,
               [&covered](std::size_t i) { covered[i] = 1; });
  for (char c : covered)
    if (!c) return false;
  return true;
}

// ===========================================================================
// Empirical zero set: linearly interpolated zeros on quadrature edges whose
// endpoints carry opposite strict signs; exact zeros at grid points count
// as zero-set vertices themselves.
// ===========================================================================
struct ZeroSet {
  std::vector<Vec3> points;
  KdTree tree;
  ManifoldKind kind = ManifoldKind::FlatTorus;

  // nearest zero in the manifold metric: (distance, index)
  std::pair<double, std::uint32_t> nearest(const Vec3& p) const {
    auto [d, id] = tree.nearest(p);
    if (kind == ManifoldKind::RoundSphere)
      d = 2.0 * std::asin(std::clamp(d / 2.0, 0.0, 1.0));
    return {d, id};
  }
};

inline ZeroSet build_zero_set(const SampledField& f) {
  const Quadrature& q = *f.quad;
  const ManifoldModel& m = *f.manifold;
  std::vector<Vec3> pts;
  for_each_edge(q, [&](std::size_t a, std::size_t b) {
    double ua = f.values[a], ub = f.values[b];
    if (ua == 0.0) return;  // handled as an exact-zero vertex below
    if (ub == 0.0) return;
    if ((ua > 0) == (ub > 0)) return;
    double t = ua / (ua - ub);
    Vec3 pa = q.points[a], pb = q.points[b];
    if (m.kind() == ManifoldKind::FlatTorus) {
      // unwrap the (single-axis) displacement before interpolating
      Vec3 d = pb - pa;
      for (int ax = 0; ax < m.dimension(); ++ax) {
        double per = m.periods()[ax];
        if (d[ax] > 0.5 * per) d[ax] -= per;
        if (d[ax] < -0.5 * per) d[ax] += per;
      }
      pts.push_back(m.canonical(pa + d * t));
    } else if (m.kind() == ManifoldKind::RoundSphere) {
      pts.push_back(normalized(lerp(pa, pb, t)));
    } else {
      pts.push_back(lerp(pa, pb, t));
    }
  });
  for (std::size_t i = 0; i < q.size(); ++i)
    if (f.values[i] == 0.0) pts.push_back(q.points[i]);
  ZeroSet z;
  z.kind = m.kind();
  std::array<double, 3> periods{0, 0, 0};
  if (m.kind() == ManifoldKind::FlatTorus)
    for (int a = 0; a < m.dimension(); ++a) periods[a] = m.periods()[a];
  z.points = pts;
  z.tree = KdTree(std::move(pts), periods);
  return z;
}

// Smallest a such that every quadrature point has a zero of f within
// distance a / (3 sqrt(lambda)); i.e. 3 sqrt(lambda) times the covering
// radius of the empirical zero set.
inline double zero_spacing_scale(const SampledField& f) {
  if (!(f.lambda >= 1.0))
    throw domain_error("zero_spacing_scale requires lambda >= 1");
  ZeroSet z = build_zero_set(f);
  if (z.points.empty())
    throw no_nodal_set_error("field has no sign change on the quadrature");
  double maxd = 0.0;
  for (const Vec3& p : f.quad->points)
    maxd = std::max(maxd, z.nearest(p).first);
  return 3.0 * std::sqrt(f.lambda) * maxd;
}

// r = a * lambda^{-1/2}; the wavelength scale of the whole construction.
inline double wavelength_radius(double a, double lambda) {
  if (!(a > 0)) throw domain_error("wavelength_radius requires a > 0");
  if (!(lambda >= 1.0))
    throw domain_error("wavelength_radius requires lambda >= 1");
  return a / std::sqrt(lambda);
}

}  // namespace nodal
