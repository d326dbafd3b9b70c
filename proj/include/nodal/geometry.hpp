#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

#include "nodal/common.hpp"

namespace nodal {

// ===========================================================================
// Triangle meshes (sphere-embedded surfaces), OFF I/O, icosphere builder.
// ===========================================================================
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;

  struct Edge {
    std::uint32_t a, b;       // a < b
    std::int32_t tri[2];      // adjacent faces, -1 if absent
  };

  double face_area(std::size_t f) const {
    const Vec3& p0 = vertices[faces[f][0]];
    const Vec3& p1 = vertices[faces[f][1]];
    const Vec3& p2 = vertices[faces[f][2]];
    return 0.5 * norm(cross(p1 - p0, p2 - p0));
  }

  double total_area() const {
    KahanSum s;
    for (std::size_t f = 0; f < faces.size(); ++f) s.add(face_area(f));
    return s.value();
  }

  // Unique edge list with face adjacency. Deterministic order (sorted keys).
  std::vector<Edge> edges() const {
    std::map<std::pair<std::uint32_t, std::uint32_t>, Edge> m;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      for (int e = 0; e < 3; ++e) {
        std::uint32_t a = faces[f][e], b = faces[f][(e + 1) % 3];
        if (a > b) std::swap(a, b);
        auto it = m.find({a, b});
        if (it == m.end()) {
          m[{a, b}] = Edge{a, b, {static_cast<std::int32_t>(f), -1}};
        } else if (it->second.tri[1] == -1) {
          it->second.tri[1] = static_cast<std::int32_t>(f);
        } else {
          throw mesh_error("edge shared by more than two triangles");
        }
      }
    }
    std::vector<Edge> out;
    out.reserve(m.size());
    for (auto& kv : m) out.push_back(kv.second);
    return out;
  }

  bool is_closed() const {
    for (const auto& e : edges())
      if (e.tri[1] == -1) return false;
    return true;
  }
};

inline TriMesh read_off(std::istream& in) {
  auto next_line = [&in]() {
    std::string line;
    while (std::getline(in, line)) {
      auto pos = line.find('#');
      if (pos != std::string::npos) line.erase(pos);
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return line;
    }
    throw mesh_error("unexpected end of OFF stream");
  };
  std::string header = next_line();
  if (header.substr(0, 3) != "OFF") throw mesh_error("missing OFF header");
  std::istringstream counts(next_line());
  std::size_t nv = 0, nf = 0, ne = 0;
  counts >> nv >> nf >> ne;
  if (!counts || nv == 0 || nf == 0) throw mesh_error("bad OFF counts line");
  TriMesh mesh;
  mesh.vertices.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    std::istringstream v(next_line());
    Vec3 p;
    v >> p.x >> p.y >> p.z;
    if (!v) throw mesh_error("bad OFF vertex line");
    mesh.vertices.push_back(p);
  }
  mesh.faces.reserve(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    std::istringstream f(next_line());
    int k = 0;
    f >> k;
    if (!f || k != 3) throw mesh_error("OFF faces must be triangles");
    std::array<std::uint32_t, 3> tri{};
    f >> tri[0] >> tri[1] >> tri[2];
    if (!f || tri[0] >= nv || tri[1] >= nv || tri[2] >= nv)
      throw mesh_error("bad OFF face indices");
    mesh.faces.push_back(tri);
  }
  return mesh;
}

inline TriMesh read_off_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mesh_error("cannot open OFF file: " + path);
  return read_off(in);
}

inline void write_off(const TriMesh& mesh, std::ostream& out) {
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
  out.precision(17);
  for (const auto& v : mesh.vertices)
    out << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const auto& f : mesh.faces)
    out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

// Icosahedron subdivided `subdiv` times, vertices projected to the unit
// sphere. Vertex count 10*4^subdiv + 2.
inline TriMesh icosphere(int subdiv) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0},
                {0, -1, t}, {0, 1, t},   {0, -1, -t}, {0, 1, -t},
                {t, 0, -1}, {t, 0, 1},   {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : m.vertices) v = normalized(v);
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdiv; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      if (a > b) std::swap(a, b);
      auto it = midpoint.find({a, b});
      if (it != midpoint.end()) return it->second;
      Vec3 p = normalized(m.vertices[a] + m.vertices[b]);
      std::uint32_t id = static_cast<std::uint32_t>(m.vertices.size());
      m.vertices.push_back(p);
      midpoint[{a, b}] = id;
      return id;
    };
    std::vector<std::array<std::uint32_t, 3>> next;
    next.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
      std::uint32_t ab = mid(f[0], f[1]), bc = mid(f[1], f[2]),
                    ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
  }
  return m;
}

// ===========================================================================
// Model manifolds: flat torus (periods P_i), round unit sphere, triangle
// mesh surface. Mesh distance is embedded chordal distance (documented
// O(h^2) defect against the induced geodesic metric).
// ===========================================================================
enum class ManifoldKind { FlatTorus, RoundSphere, MeshSurface };

class ManifoldModel {
 public:
  static ManifoldModel flat_torus(std::vector<double> periods) {
    if (periods.size() < 2 || periods.size() > 3)
      throw config_error("torus dimension must be 2 or 3");
    for (double p : periods)
      if (!(p > 0)) throw config_error("torus periods must be positive");
    ManifoldModel m;
    m.kind_ = ManifoldKind::FlatTorus;
    m.dim_ = static_cast<int>(periods.size());
    m.periods_ = std::move(periods);
    return m;
  }

  static ManifoldModel round_sphere() {
    ManifoldModel m;
    m.kind_ = ManifoldKind::RoundSphere;
    m.dim_ = 2;
    return m;
  }

  static ManifoldModel mesh_surface(TriMesh mesh) {
    if (mesh.vertices.empty() || mesh.faces.empty())
      throw mesh_error("empty mesh");
    ManifoldModel m;
    m.kind_ = ManifoldKind::MeshSurface;
    m.dim_ = 2;
    m.mesh_ = std::make_shared<TriMesh>(std::move(mesh));
    return m;
  }

  ManifoldKind kind() const { return kind_; }
  int dimension() const { return dim_; }
  const std::vector<double>& periods() const { return periods_; }
  const TriMesh& mesh() const { return *mesh_; }
  bool has_mesh() const { return mesh_ != nullptr; }

  double volume() const {
    switch (kind_) {
      case ManifoldKind::FlatTorus: {
        double v = 1.0;
        for (double p : periods_) v *= p;
        return v;
      }
      case ManifoldKind::RoundSphere:
        return 4.0 * kPi;
      case ManifoldKind::MeshSurface:
        return mesh_->total_area();
    }
    return 0.0;
  }

  double diameter() const {
    switch (kind_) {
      case ManifoldKind::FlatTorus: {
        double s = 0.0;
        for (double p : periods_) s += 0.25 * p * p;
        return std::sqrt(s);
      }
      case ManifoldKind::RoundSphere:
        return kPi;
      case ManifoldKind::MeshSurface:
        return 2.0;  // chordal diameter bound, unit-sphere convention
    }
    return 0.0;
  }

  // Scale below which balls behave like their model-space counterparts.
  // Torus: half the shortest period. Sphere (and sphere-like meshes): pi.
  double injectivity_scale() const {
    if (kind_ == ManifoldKind::FlatTorus)
      return 0.5 * *std::min_element(periods_.begin(), periods_.end());
    return kPi;
  }

  Vec3 canonical(Vec3 p) const {
    if (kind_ == ManifoldKind::FlatTorus) {
      for (int i = 0; i < dim_; ++i) {
        double v = std::fmod(p[i], periods_[i]);
        if (v < 0) v += periods_[i];
        p[i] = v;
      }
    }
    return p;
  }

  void validate_point(const Vec3& p) const {
    if (kind_ == ManifoldKind::RoundSphere &&
        std::abs(norm(p) - 1.0) > 1e-8)
      throw invalid_point_error("sphere point is not on the unit sphere");
  }

  double distance(const Vec3& p, const Vec3& q) const {
    switch (kind_) {
      case ManifoldKind::FlatTorus: {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) {
          double d = std::abs(p[i] - q[i]);
          d = std::fmod(d, periods_[i]);
          d = std::min(d, periods_[i] - d);
          s += d * d;
        }
        return std::sqrt(s);
      }
      case ManifoldKind::RoundSphere: {
        validate_point(p);
        validate_point(q);
        return std::acos(std::clamp(dot(p, q), -1.0, 1.0));
      }
      case ManifoldKind::MeshSurface:
        return norm(p - q);
    }
    return 0.0;
  }

 private:
  ManifoldKind kind_ = ManifoldKind::FlatTorus;
  int dim_ = 2;
  std::vector<double> periods_;
  std::shared_ptr<TriMesh> mesh_;
};

// ===========================================================================
// Quadrature rules.
//   torus : uniform corner-aligned grid, res^n points, equal weights
//   sphere: Gauss-Legendre latitudes x 2*res uniform longitudes. The GL
//           area weights integrate every spherical polynomial of degree
//           < 2*res exactly, which the eigenfunction contracts
//           (int u = 0 to 1e-6, int u^2 = 1 to 1e-8) require; a midpoint
//           sin(theta) ladder cannot reach those tolerances at practical
//           resolutions.
//   mesh  : one node per vertex, one third of the incident triangle areas
// ===========================================================================
struct Quadrature {
  ManifoldKind kind = ManifoldKind::FlatTorus;
  int n = 2;                    // manifold dimension
  int res = 0;                  // per-axis (torus) or latitude count (sphere)
  int nphi = 0;                 // sphere longitude count
  std::vector<double> theta;    // sphere latitude nodes (colatitude)
  std::vector<double> periods;  // torus
  std::vector<Vec3> points;
  std::vector<double> weights;
  double spacing = 0.0;         // certified max neighbor distance
  const TriMesh* mesh = nullptr;

  std::size_t size() const { return points.size(); }

  // torus grid index helpers
  std::size_t torus_id(int i, int j) const {
    return static_cast<std::size_t>(i) * res + j;
  }
  std::size_t torus_id(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * res + j) * res + k;
  }
  std::size_t sphere_id(int i, int j) const {
    return static_cast<std::size_t>(i) * nphi + j;
  }
};

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x,
                           std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double xi = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      double dx = p1 / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    x[i] = -xi;  // ascending
    x[n - 1 - i] = xi;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
}

inline Quadrature build_quadrature(const ManifoldModel& m, int resolution) {
  if (m.kind() != ManifoldKind::MeshSurface && resolution < 8)
    throw config_error("quadrature resolution must be >= 8");
  Quadrature q;
  q.kind = m.kind();
  q.n = m.dimension();
  switch (m.kind()) {
    case ManifoldKind::FlatTorus: {
      q.res = resolution;
      q.periods = m.periods();
      int n = q.n;
      std::vector<double> h(n);
      double w = 1.0;
      for (int i = 0; i < n; ++i) {
        h[i] = q.periods[i] / resolution;
        w *= h[i];
      }
      q.spacing = *std::max_element(h.begin(), h.end());
      std::size_t total = 1;
      for (int i = 0; i < n; ++i) total *= resolution;
      q.points.reserve(total);
      if (n == 2) {
        for (int i = 0; i < resolution; ++i)
          for (int j = 0; j < resolution; ++j)
            q.points.push_back({i * h[0], j * h[1], 0.0});
      } else {
        for (int i = 0; i < resolution; ++i)
          for (int j = 0; j < resolution; ++j)
            for (int k = 0; k < resolution; ++k)
              q.points.push_back({i * h[0], j * h[1], k * h[2]});
      }
      q.weights.assign(total, w);
      break;
    }
    case ManifoldKind::RoundSphere: {
      q.res = resolution;
      q.nphi = 2 * resolution;
      std::vector<double> x, wgl;
      gauss_legendre(resolution, x, wgl);
      q.theta.resize(resolution);
      for (int i = 0; i < resolution; ++i)
        q.theta[i] = std::acos(x[resolution - 1 - i]);  // ascending colatitude
      double dphi = kTwoPi / q.nphi;
      q.points.reserve(static_cast<std::size_t>(resolution) * q.nphi);
      q.weights.reserve(q.points.capacity());
      for (int i = 0; i < resolution; ++i) {
        double st = std::sin(q.theta[i]), ct = std::cos(q.theta[i]);
        double wi = wgl[resolution - 1 - i] * dphi;
        for (int j = 0; j < q.nphi; ++j) {
          double phi = j * dphi;
          q.points.push_back({st * std::cos(phi), st * std::sin(phi), ct});
          q.weights.push_back(wi);
        }
      }
      double pitch = std::max(q.theta.front(), kPi - q.theta.back());
      for (int i = 0; i + 1 < resolution; ++i)
        pitch = std::max(pitch, q.theta[i + 1] - q.theta[i]);
      q.spacing = std::max(pitch, dphi);
      break;
    }
    case ManifoldKind::MeshSurface: {
      const TriMesh& mesh = m.mesh();
      q.mesh = &mesh;
      q.points = mesh.vertices;
      q.weights.assign(mesh.vertices.size(), 0.0);
      for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        double a3 = mesh.face_area(f) / 3.0;
        for (int v = 0; v < 3; ++v) q.weights[mesh.faces[f][v]] += a3;
      }
      double h = 0.0;
      for (const auto& e : mesh.edges())
        h = std::max(h, norm(mesh.vertices[e.a] - mesh.vertices[e.b]));
      q.spacing = h;
      break;
    }
  }
  return q;
}

// ---------------------------------------------------------------------------
// Closed-ball point queries, accelerated per layout (integer windows on the
// torus grid, row-wise longitude windows on the sphere, scan on meshes).
// Every candidate is confirmed with an exact distance test.
// ---------------------------------------------------------------------------
namespace detail {

template <typename F>
void torus_ball_visit(const ManifoldModel& m, const Quadrature& q,
                      const Vec3& center, double r, F&& visit) {
  int res = q.res;
  int n = q.n;
  double r2 = r * r;
  std::array<int, 3> lo{}, hi{};
  std::array<double, 3> h{};
  for (int a = 0; a < n; ++a) {
    h[a] = q.periods[a] / res;
    double half = 0.5 * q.periods[a];
    if (r >= half) {
      lo[a] = 0;
      hi[a] = res - 1;
    } else {
      lo[a] = static_cast<int>(std::ceil((center[a] - r) / h[a] - 1e-12));
      hi[a] = static_cast<int>(std::floor((center[a] + r) / h[a] + 1e-12));
    }
  }
  auto wrap = [res](int i) {
    i %= res;
    return i < 0 ? i + res : i;
  };
  auto axdist = [&](int a, int i) {
    double d = std::abs(i * h[a] - center[a]);
    d = std::fmod(d, q.periods[a]);
    return std::min(d, q.periods[a] - d);
  };
  if (n == 2) {
    for (int i = lo[0]; i <= hi[0]; ++i) {
      double dx = axdist(0, i);
      if (dx * dx > r2) continue;
      int iw = wrap(i);
      for (int j = lo[1]; j <= hi[1]; ++j) {
        double dy = axdist(1, j);
        if (dx * dx + dy * dy <= r2) visit(q.torus_id(iw, wrap(j)));
      }
    }
  } else {
    for (int i = lo[0]; i <= hi[0]; ++i) {
      double dx = axdist(0, i);
      if (dx * dx > r2) continue;
      int iw = wrap(i);
      for (int j = lo[1]; j <= hi[1]; ++j) {
        double dy = axdist(1, j);
        if (dx * dx + dy * dy > r2) continue;
        int jw = wrap(j);
        for (int k = lo[2]; k <= hi[2]; ++k) {
          double dz = axdist(2, k);
          if (dx * dx + dy * dy + dz * dz <= r2)
            visit(q.torus_id(iw, jw, wrap(k)));
        }
      }
    }
  }
  (void)m;
}

template <typename F>
void sphere_ball_visit(const Quadrature& q, const Vec3& center, double r,
                       F&& visit) {
  if (r >= kPi) {
    for (std::size_t i = 0; i < q.size(); ++i) visit(i);
    return;
  }
  double cr = std::cos(r);
  double tc = std::acos(std::clamp(center.z, -1.0, 1.0));
  double st_c = std::sin(tc);
  double phic = std::atan2(center.y, center.x);
  double dphi = kTwoPi / q.nphi;
  int res = q.res;
  for (int i = 0; i < res; ++i) {
    double th = q.theta[i];
    if (th < tc - r - 1e-12 || th > tc + r + 1e-12) continue;
    double st = std::sin(th), ct = std::cos(th);
    double denom = st_c * st;
    int jlo = 0, jhi = q.nphi - 1;
    bool full = false;
    if (denom < 1e-14) {
      full = true;  // center at a pole: row is in iff |th - tc| <= r
    } else {
      double t = (cr - center.z * ct) / denom;
      if (t <= -1.0)
        full = true;
      else if (t >= 1.0) {
        // row may still touch at a single longitude; widen and exact-test
        double hw = 0.0;
        int jc = static_cast<int>(std::floor(phic / dphi));
        jlo = jc - 1;
        jhi = jc + 1 + static_cast<int>(hw / dphi);
      } else {
        double hw = std::acos(t);
        int jc = static_cast<int>(std::floor(phic / dphi));
        int w = static_cast<int>(std::ceil(hw / dphi)) + 1;
        jlo = jc - w;
        jhi = jc + w;
      }
    }
    if (full) {
      jlo = 0;
      jhi = q.nphi - 1;
    }
    if (jhi - jlo + 1 >= q.nphi) {
      jlo = 0;
      jhi = q.nphi - 1;
    }
    for (int j = jlo; j <= jhi; ++j) {
      int jw = j % q.nphi;
      if (jw < 0) jw += q.nphi;
      std::size_t id = q.sphere_id(i, jw);
      if (dot(q.points[id], center) >= cr - 1e-15) visit(id);
    }
  }
}

}  // namespace detail

// Visit indices of quadrature points with distance(center, .) <= r.
template <typename F>
void ball_visit(const ManifoldModel& m, const Quadrature& q,
                const Vec3& center, double r, F&& visit) {
  switch (m.kind()) {
    case ManifoldKind::FlatTorus:
      detail::torus_ball_visit(m, q, m.canonical(center), r,
                               std::forward<F>(visit));
      break;
    case ManifoldKind::RoundSphere:
      detail::sphere_ball_visit(q, center, r, std::forward<F>(visit));
      break;
    case ManifoldKind::MeshSurface: {
      double r2 = r * r;
      for (std::size_t i = 0; i < q.size(); ++i) {
        Vec3 d = q.points[i] - center;
        if (dot(d, d) <= r2) visit(i);
      }
      break;
    }
  }
}

inline std::vector<std::uint32_t> ball_points(const ManifoldModel& m,
                                              const Quadrature& q,
                                              const Vec3& center, double r) {
  std::vector<std::uint32_t> out;
  ball_visit(m, q, center, r,
             [&out](std::size_t i) { out.push_back(static_cast<std::uint32_t>(i)); });
  std::sort(out.begin(), out.end());
  return out;
}

inline double ball_volume(const ManifoldModel& m, const Quadrature& q,
                          const Vec3& p, double r) {
  if (!(r > 0)) throw domain_error("ball radius must be positive");
  m.validate_point(p);
  KahanSum s;
  auto ids = ball_points(m, q, p, r);
  for (auto i : ids) s.add(q.weights[i]);
  return s.value();
}

// Vol(B_{5r}) / Vol(B_{r/2}); the empirical overlap constant C_M certifier.
inline double bishop_gromov_ratio(const ManifoldModel& m, const Quadrature& q,
                                  const Vec3& p, double r) {
  if (!(r > 0) || r > m.diameter() / 6.0)
    throw domain_error("bishop_gromov_ratio requires 0 < r <= diameter/6");
  double inner = ball_volume(m, q, p, 0.5 * r);
  if (inner <= 0.0)
    throw resolution_error("inner ball contains no quadrature point");
  return ball_volume(m, q, p, 5.0 * r) / inner;
}

// |Delta d + (1-n)/s| for the model manifolds: identically zero on a flat
// torus, (n-1)|cot s - 1/s| on the unit sphere (and sphere-like meshes).
// This realizes the comparison function h(s); it is point-independent here.
inline double laplacian_of_distance_defect(const ManifoldModel& m, double s) {
  if (!(s > 0) || s >= m.injectivity_scale())
    throw domain_error("s outside (0, injectivity scale)");
  switch (m.kind()) {
    case ManifoldKind::FlatTorus:
      return 0.0;
    case ManifoldKind::RoundSphere:
    case ManifoldKind::MeshSurface:
      return (m.dimension() - 1) * std::abs(1.0 / std::tan(s) - 1.0 / s);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Quadrature edge iteration (grid neighbors / mesh edges); the empirical
// zero set lives on these edges.
// ---------------------------------------------------------------------------
template <typename F>
void for_each_edge(const Quadrature& q, F&& f) {
  switch (q.kind) {
    case ManifoldKind::FlatTorus: {
      int res = q.res;
      if (q.n == 2) {
        for (int i = 0; i < res; ++i)
          for (int j = 0; j < res; ++j) {
            std::size_t id = q.torus_id(i, j);
            f(id, q.torus_id((i + 1) % res, j));
            f(id, q.torus_id(i, (j + 1) % res));
          }
      } else {
        for (int i = 0; i < res; ++i)
          for (int j = 0; j < res; ++j)
            for (int k = 0; k < res; ++k) {
              std::size_t id = q.torus_id(i, j, k);
              f(id, q.torus_id((i + 1) % res, j, k));
              f(id, q.torus_id(i, (j + 1) % res, k));
              f(id, q.torus_id(i, j, (k + 1) % res));
            }
      }
      break;
    }
    case ManifoldKind::RoundSphere: {
      for (int i = 0; i < q.res; ++i)
        for (int j = 0; j < q.nphi; ++j) {
          std::size_t id = q.sphere_id(i, j);
          f(id, q.sphere_id(i, (j + 1) % q.nphi));
          if (i + 1 < q.res) f(id, q.sphere_id(i + 1, j));
        }
      break;
    }
    case ManifoldKind::MeshSurface: {
      for (const auto& e : q.mesh->edges()) f(e.a, e.b);
      break;
    }
  }
}

}  // namespace nodal
