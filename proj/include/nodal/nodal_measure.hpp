#pragma once

#include "nodal/eigenmodes.hpp"
#include "nodal/fit.hpp"
#include "nodal/kdtree.hpp"

namespace nodal {

// ===========================================================================
// Piecewise-linear zero set {u = 0}: segments on surfaces (n = 2),
// triangles on 3-tori (n = 3). Crossing locations are linear interpolations
// along sign-change cell edges; torus pieces are measured in the covering
// chart, sphere pieces with chordal length (O(h^2) defect).
// ===========================================================================
struct NodalPiece {
  Vec3 a, b, c;  // c unused for segments
  double measure = 0.0;
};

struct NodalEstimate {
  int n = 2;
  int resolution = 0;
  double total = 0.0;
  bool empty_warning = false;
  std::vector<NodalPiece> pieces;
  // spatial index over piece midpoints for ball queries
  KdTree midpoint_tree;
  double max_piece_radius = 0.0;

  Vec3 piece_midpoint(const NodalPiece& p) const {
    if (n == 2) return lerp(p.a, p.b, 0.5);
    return (p.a + p.b + p.c) * (1.0 / 3.0);
  }
};

namespace detail {

// Sign class: exact zeros count as positive, so a vertex zero produces
// crossings exactly at that vertex from the negative side only (the nodal
// line through it is emitted once).
inline bool positive_class(double u) { return u >= 0.0; }

struct NodalBuilder {
  const ManifoldModel* man = nullptr;
  std::vector<NodalPiece> pieces;

  Vec3 crossing(const Vec3& pa, const Vec3& pb, double ua, double ub) const {
    double t = ua / (ua - ub);
    return lerp(pa, pb, t);
  }

  void triangle(const Vec3& p0, const Vec3& p1, const Vec3& p2, double u0,
                double u1, double u2) {
    bool s0 = positive_class(u0), s1 = positive_class(u1),
         s2 = positive_class(u2);
    if (s0 == s1 && s1 == s2) return;
    Vec3 q0, q1;
    if (s0 != s1 && s0 != s2) {
      q0 = crossing(p0, p1, u0, u1);
      q1 = crossing(p0, p2, u0, u2);
    } else if (s1 != s0 && s1 != s2) {
      q0 = crossing(p1, p0, u1, u0);
      q1 = crossing(p1, p2, u1, u2);
    } else {
      q0 = crossing(p2, p0, u2, u0);
      q1 = crossing(p2, p1, u2, u1);
    }
    double len = norm(q1 - q0);
    if (len > 0.0) pieces.push_back({q0, q1, {}, len});
  }

  void emit_tri(const Vec3& q0, const Vec3& q1, const Vec3& q2) {
    double area = 0.5 * norm(cross(q1 - q0, q2 - q0));
    if (area > 0.0) pieces.push_back({q0, q1, q2, area});
  }

  void tetrahedron(const std::array<Vec3, 4>& p, const std::array<double, 4>& u) {
    int pos[4], neg[4], np = 0, nn = 0;
    for (int i = 0; i < 4; ++i) {
      if (positive_class(u[i]))
        pos[np++] = i;
      else
        neg[nn++] = i;
    }
    if (np == 0 || nn == 0) return;
    if (np == 1 || nn == 1) {
      int apex = (np == 1) ? pos[0] : neg[0];
      int* other = (np == 1) ? neg : pos;
      Vec3 q[3];
      for (int i = 0; i < 3; ++i)
        q[i] = crossing(p[apex], p[other[i]], u[apex], u[other[i]]);
      emit_tri(q[0], q[1], q[2]);
    } else {
      // 2-2 split: quad with corners on the four crossing edges
      Vec3 q00 = crossing(p[pos[0]], p[neg[0]], u[pos[0]], u[neg[0]]);
      Vec3 q01 = crossing(p[pos[0]], p[neg[1]], u[pos[0]], u[neg[1]]);
      Vec3 q10 = crossing(p[pos[1]], p[neg[0]], u[pos[1]], u[neg[0]]);
      Vec3 q11 = crossing(p[pos[1]], p[neg[1]], u[pos[1]], u[neg[1]]);
      emit_tri(q00, q01, q11);
      emit_tri(q00, q11, q10);
    }
  }
};

}  // namespace detail

inline NodalEstimate extract_nodal(const SampledField& f, int resolution) {
  const ManifoldModel& m = *f.manifold;
  NodalEstimate est;
  est.n = m.dimension();
  est.resolution = resolution;
  detail::NodalBuilder builder;
  builder.man = &m;

  if (m.kind() == ManifoldKind::MeshSurface) {
    const TriMesh& mesh = m.mesh();
    for (const auto& face : mesh.faces)
      builder.triangle(mesh.vertices[face[0]], mesh.vertices[face[1]],
                       mesh.vertices[face[2]], f.values[face[0]],
                       f.values[face[1]], f.values[face[2]]);
  } else {
    if (!f.analytic())
      throw domain_error("extract_nodal needs an analytic evaluator here");
    if (resolution < 64)
      throw config_error("extraction resolution must be >= 64");
    if (m.kind() == ManifoldKind::FlatTorus && m.dimension() == 2) {
      double hx = m.periods()[0] / resolution;
      double hy = m.periods()[1] / resolution;
      std::vector<double> row0(resolution + 1), row1(resolution + 1);
      auto fill = [&](int i, std::vector<double>& row) {
        for (int j = 0; j <= resolution; ++j)
          row[j] = f.evaluator({i * hx, j * hy, 0.0});
      };
      fill(0, row0);
      for (int i = 0; i < resolution; ++i) {
        fill(i + 1, row1);
        for (int j = 0; j < resolution; ++j) {
          Vec3 p00{i * hx, j * hy, 0}, p10{(i + 1) * hx, j * hy, 0};
          Vec3 p01{i * hx, (j + 1) * hy, 0}, p11{(i + 1) * hx, (j + 1) * hy, 0};
          builder.triangle(p00, p10, p11, row0[j], row1[j], row1[j + 1]);
          builder.triangle(p00, p11, p01, row0[j], row1[j + 1], row0[j + 1]);
        }
        std::swap(row0, row1);
      }
    } else if (m.kind() == ManifoldKind::RoundSphere) {
      int nphi = 2 * resolution;
      double dphi = kTwoPi / nphi;
      auto node = [&](int i, int j) {
        double th = (i + 0.5) * kPi / resolution;
        double ph = (j % nphi) * dphi;
        return Vec3{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                    std::cos(th)};
      };
      std::vector<Vec3> prow0(nphi), prow1(nphi);
      std::vector<double> row0(nphi), row1(nphi);
      for (int j = 0; j < nphi; ++j) {
        prow0[j] = node(0, j);
        row0[j] = f.evaluator(prow0[j]);
      }
      for (int i = 0; i + 1 < resolution; ++i) {
        for (int j = 0; j < nphi; ++j) {
          prow1[j] = node(i + 1, j);
          row1[j] = f.evaluator(prow1[j]);
        }
        for (int j = 0; j < nphi; ++j) {
          int jn = (j + 1) % nphi;
          builder.triangle(prow0[j], prow1[j], prow1[jn], row0[j], row1[j],
                           row1[jn]);
          builder.triangle(prow0[j], prow1[jn], prow0[jn], row0[j], row1[jn],
                           row0[jn]);
        }
        std::swap(prow0, prow1);
        std::swap(row0, row1);
      }
    } else {  // flat 3-torus: Kuhn split of each cube into 6 tetrahedra
      double h = m.periods()[0] / resolution;
      static const int kTets[6][4] = {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7},
                                      {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}};
      // cube corner c: bit0 -> +x, bit1 -> +y, bit2 -> +z
      int res = resolution;
      std::vector<double> slab0(static_cast<std::size_t>(res + 1) * (res + 1));
      std::vector<double> slab1(slab0.size());
      auto at = [res](std::vector<double>& s, int j, int k) -> double& {
        return s[static_cast<std::size_t>(j) * (res + 1) + k];
      };
      auto fill = [&](int i, std::vector<double>& s) {
        for (int j = 0; j <= res; ++j)
          for (int k = 0; k <= res; ++k)
            at(s, j, k) = f.evaluator({i * h, j * h, k * h});
      };
      fill(0, slab0);
      for (int i = 0; i < res; ++i) {
        fill(i + 1, slab1);
        for (int j = 0; j < res; ++j)
          for (int k = 0; k < res; ++k) {
            Vec3 corner[8];
            double val[8];
            for (int c = 0; c < 8; ++c) {
              int di = c & 1, dj = (c >> 1) & 1, dk = (c >> 2) & 1;
              corner[c] = {(i + di) * h, (j + dj) * h, (k + dk) * h};
              val[c] = di ? at(slab1, j + dj, k + dk) : at(slab0, j + dj, k + dk);
            }
            for (const auto& tet : kTets) {
              builder.tetrahedron(
                  {corner[tet[0]], corner[tet[1]], corner[tet[2]],
                   corner[tet[3]]},
                  {val[tet[0]], val[tet[1]], val[tet[2]], val[tet[3]]});
            }
          }
        std::swap(slab0, slab1);
      }
    }
  }

  est.pieces = std::move(builder.pieces);
  est.empty_warning = est.pieces.empty();
  KahanSum total;
  for (const auto& p : est.pieces) total.add(p.measure);
  est.total = total.value();

  std::vector<Vec3> mids;
  mids.reserve(est.pieces.size());
  for (const auto& p : est.pieces) {
    Vec3 mid = est.piece_midpoint(p);
    double rad = norm(p.a - mid);
    rad = std::max(rad, norm(p.b - mid));
    if (est.n == 3) rad = std::max(rad, norm(p.c - mid));
    est.max_piece_radius = std::max(est.max_piece_radius, rad);
    mids.push_back(m.kind() == ManifoldKind::FlatTorus ? m.canonical(mid)
                                                       : mid);
  }
  std::array<double, 3> periods{0, 0, 0};
  if (m.kind() == ManifoldKind::FlatTorus)
    for (int a = 0; a < m.dimension(); ++a) periods[a] = m.periods()[a];
  est.midpoint_tree = KdTree(std::move(mids), periods);
  return est;
}

namespace detail {

// Distance from a (possibly off-surface) chart point to the ball center.
inline double clip_distance(const ManifoldModel& m, const Vec3& p,
                            const Vec3& center) {
  if (m.kind() == ManifoldKind::RoundSphere)
    return std::acos(std::clamp(dot(normalized(p), center), -1.0, 1.0));
  return m.distance(m.canonical(p), center);
}

}  // namespace detail

// H^{n-1} measure of the estimate inside the closed ball B_r(center).
// Pieces fully inside count whole; straddling pieces are subdivided once
// and kept by midpoint membership (documented O(h) boundary error).
inline double nodal_in_ball(const NodalEstimate& est, const ManifoldModel& m,
                            const Vec3& center, double r) {
  if (est.pieces.empty()) return 0.0;
  Vec3 c = m.kind() == ManifoldKind::FlatTorus ? m.canonical(center) : center;
  double query_r = r + est.max_piece_radius + 1e-12;
  std::vector<std::uint32_t> cand;
  if (m.kind() == ManifoldKind::RoundSphere)
    cand = est.midpoint_tree.radius(c, 2.0 * std::sin(std::min(query_r, kPi) / 2.0));
  else
    cand = est.midpoint_tree.radius(c, query_r);
  KahanSum total;
  std::sort(cand.begin(), cand.end());
  for (auto idx : cand) {
    const NodalPiece& p = est.pieces[idx];
    if (est.n == 2) {
      bool ina = detail::clip_distance(m, p.a, c) <= r;
      bool inb = detail::clip_distance(m, p.b, c) <= r;
      if (ina && inb) {
        total.add(p.measure);
      } else {
        if (detail::clip_distance(m, lerp(p.a, p.b, 0.25), c) <= r)
          total.add(0.5 * p.measure);
        if (detail::clip_distance(m, lerp(p.a, p.b, 0.75), c) <= r)
          total.add(0.5 * p.measure);
      }
    } else {
      bool ina = detail::clip_distance(m, p.a, c) <= r;
      bool inb = detail::clip_distance(m, p.b, c) <= r;
      bool inc = detail::clip_distance(m, p.c, c) <= r;
      if (ina && inb && inc) {
        total.add(p.measure);
      } else {
        Vec3 mab = lerp(p.a, p.b, 0.5), mbc = lerp(p.b, p.c, 0.5),
             mca = lerp(p.c, p.a, 0.5);
        const Vec3 sub[4][3] = {{p.a, mab, mca},
                                {p.b, mbc, mab},
                                {p.c, mca, mbc},
                                {mab, mbc, mca}};
        for (const auto& t : sub) {
          Vec3 centroid = (t[0] + t[1] + t[2]) * (1.0 / 3.0);
          if (detail::clip_distance(m, centroid, c) <= r)
            total.add(0.25 * p.measure);
        }
      }
    }
  }
  return total.value();
}

// ===========================================================================
// Sign decompositions on balls. Exact zeros belong to neither sign set.
// ===========================================================================
struct SignVolumes {
  double vol_plus = 0.0;
  double vol_minus = 0.0;
};

inline SignVolumes sign_volumes(const SampledField& f, const Vec3& center,
                                double r) {
  KahanSum vp, vm;
  ball_visit(*f.manifold, *f.quad, center, r, [&](std::size_t i) {
    if (f.values[i] > 0.0)
      vp.add(f.quad->weights[i]);
    else if (f.values[i] < 0.0)
      vm.add(f.quad->weights[i]);
  });
  return {vp.value(), vm.value()};
}

struct SignMasses {
  double int_plus = 0.0;
  double int_minus = 0.0;
  double int_abs = 0.0;  // = int_plus + int_minus (exact partition)
};

inline SignMasses sign_masses(const SampledField& f, const Vec3& center,
                              double r) {
  KahanSum ip, im;
  ball_visit(*f.manifold, *f.quad, center, r, [&](std::size_t i) {
    double wu = f.quad->weights[i] * f.values[i];
    if (wu > 0.0)
      ip.add(wu);
    else if (wu < 0.0)
      im.add(-wu);
  });
  SignMasses s;
  s.int_plus = ip.value();
  s.int_minus = im.value();
  s.int_abs = s.int_plus + s.int_minus;
  return s;
}

// Isoperimetric pairing: nodal measure in the ball against
// min(vol_plus, vol_minus)^{(n-1)/n}. One-signed balls are flagged skipped.
struct IsoperimetricLink {
  double lhs = 0.0;
  double rhs = 0.0;
  bool skipped = false;
};

inline IsoperimetricLink isoperimetric_link(const NodalEstimate& est,
                                            const SampledField& f,
                                            const Vec3& center, double r) {
  SignVolumes sv = sign_volumes(f, center, r);
  double mn = std::min(sv.vol_plus, sv.vol_minus);
  if (mn <= 0.0) return {0.0, 0.0, true};
  int n = f.manifold->dimension();
  return {nodal_in_ball(est, *f.manifold, center, r),
          std::pow(mn, (n - 1.0) / n), false};
}

// Fit of total nodal measure against lambda, with the smallest ratio
// against the theorem-rate lambda^{(3-n)/4} reported as c_min.
struct TheoremFit {
  ScalingFit fit;
  double c_min = 0.0;
};

inline TheoremFit total_vs_theorem(
    const std::vector<std::pair<double, double>>& lambda_total, int n) {
  if (lambda_total.size() < 5)
    throw insufficient_sweep_error("total_vs_theorem needs >= 5 sweep members");
  TheoremFit out;
  out.fit = loglog_fit(lambda_total);
  out.c_min = std::numeric_limits<double>::infinity();
  for (const auto& s : lambda_total)
    out.c_min =
        std::min(out.c_min, s.second / std::pow(s.first, (3.0 - n) / 4.0));
  return out;
}

}  // namespace nodal
