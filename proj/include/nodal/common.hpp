#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace nodal {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// Error hierarchy. The CLI maps config_error to exit code 2 and everything
// else derived from nodal::error to exit code 3.
// ---------------------------------------------------------------------------
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct config_error : error {
  using error::error;
};
struct invalid_point_error : error {
  using error::error;
};
struct resolution_error : error {
  using error::error;
};
struct domain_error : error {
  using error::error;
};
struct degenerate_field_error : error {
  using error::error;
};
struct mesh_error : error {
  using error::error;
};
struct no_nodal_set_error : error {
  using error::error;
};
struct convergence_error : error {
  convergence_error(const std::string& what, double best)
      : error(what), best_residual(best) {}
  double best_residual;
};

// ---------------------------------------------------------------------------
// Small fixed-size point type. Used for every manifold point: flat tori use
// the first n coordinates, sphere and mesh points live in R^3.
// ---------------------------------------------------------------------------
struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  return {a.x / n, a.y / n, a.z / n};
}
inline Vec3 lerp(const Vec3& a, const Vec3& b, double t) {
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, a.z + (b.z - a.z) * t};
}

// ---------------------------------------------------------------------------
// Compensated (Kahan) accumulator. All integrals in the library fold in
// fixed point-index order through this, so results are bit-stable across
// runs regardless of optimization level.
// ---------------------------------------------------------------------------
class KahanSum {
 public:
  void add(double v) {
    double y = v - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace nodal
