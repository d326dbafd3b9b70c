#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nodal/geometry.hpp"

namespace nodal {

// ===========================================================================
// Sampled eigenfunctions. Values live on a quadrature; closed-form families
// also carry point evaluators (value and Laplacian) for extraction at other
// resolutions and for residual spot-checks. Mesh eigenfunctions carry none.
// ===========================================================================
struct SampledField {
  std::shared_ptr<const ManifoldModel> manifold;
  std::shared_ptr<const Quadrature> quad;
  std::vector<double> values;
  double lambda = 0.0;
  std::function<double(const Vec3&)> evaluator;
  std::function<double(const Vec3&)> laplacian;
  std::string family;

  bool analytic() const { return static_cast<bool>(evaluator); }
};

inline double integral(const SampledField& f) {
  KahanSum s;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    s.add(f.quad->weights[i] * f.values[i]);
  return s.value();
}

inline double integral_sq(const SampledField& f) {
  KahanSum s;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    s.add(f.quad->weights[i] * f.values[i] * f.values[i]);
  return s.value();
}

inline double max_abs(const SampledField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

// Scale a field so the quadrature integral of u^2 is exactly one.
inline SampledField normalize_l2(SampledField f) {
  double sq = integral_sq(f);
  if (!(sq > 0))
    throw degenerate_field_error("cannot normalize a zero field");
  double scale = 1.0 / std::sqrt(sq);
  for (double& v : f.values) v *= scale;
  if (f.evaluator) {
    auto ev = f.evaluator;
    f.evaluator = [ev, scale](const Vec3& p) { return scale * ev(p); };
  }
  if (f.laplacian) {
    auto lp = f.laplacian;
    f.laplacian = [lp, scale](const Vec3& p) { return scale * lp(p); };
  }
  return f;
}

// ===========================================================================
// Flat-torus modes: u = prod_i trig(k_i x_i), lambda = |k|^2. Axes with
// k_i = 0 contribute a constant factor 1.
// ===========================================================================
enum class Phase { Sin, Cos };

inline SampledField torus_mode(std::shared_ptr<const ManifoldModel> man,
                               std::shared_ptr<const Quadrature> quad,
                               std::vector<int> k, std::vector<Phase> phase) {
  if (man->kind() != ManifoldKind::FlatTorus)
    throw domain_error("torus_mode requires a flat torus");
  for (double p : man->periods())
    if (std::abs(p - kTwoPi) > 1e-12)
      throw domain_error("torus_mode requires periods 2*pi");
  int n = man->dimension();
  if (static_cast<int>(k.size()) != n || phase.size() != k.size())
    throw config_error("torus_mode: k and phase must have length n");
  double lambda = 0.0;
  for (int ki : k) lambda += static_cast<double>(ki) * ki;
  if (lambda == 0.0)
    throw domain_error("torus_mode: k = 0 gives the excluded constant mode");

  auto eval = [k, phase, n](const Vec3& p) {
    double v = 1.0;
    for (int i = 0; i < n; ++i) {
      if (k[i] == 0) continue;
      double a = k[i] * p[i];
      v *= (phase[i] == Phase::Sin) ? std::sin(a) : std::cos(a);
    }
    return v;
  };
  SampledField f;
  f.manifold = std::move(man);
  f.quad = std::move(quad);
  f.lambda = lambda;
  f.family = "torus-mode";
  f.values.resize(f.quad->size());
  for (std::size_t i = 0; i < f.quad->size(); ++i)
    f.values[i] = eval(f.quad->points[i]);
  f.evaluator = eval;
  f.laplacian = [eval, lambda](const Vec3& p) { return -lambda * eval(p); };
  return normalize_l2(std::move(f));
}

// ===========================================================================
// Legendre polynomials with first and second derivatives by the stable
// upward recurrences P'_{k+1} = P'_{k-1} + (2k+1) P_k (and its derivative).
// ===========================================================================
struct LegendreTriple {
  double p, dp, d2p;
};

inline LegendreTriple legendre_triple(int l, double x) {
  if (l == 0) return {1.0, 0.0, 0.0};
  double pm1 = 1.0, p = x;
  double dm1 = 0.0, d = 1.0;
  double sm1 = 0.0, s = 0.0;
  for (int k = 1; k < l; ++k) {
    double pn = ((2 * k + 1) * x * p - k * pm1) / (k + 1);
    double dn = dm1 + (2 * k + 1) * p;
    double sn = sm1 + (2 * k + 1) * d;
    pm1 = p;
    p = pn;
    dm1 = d;
    d = dn;
    sm1 = s;
    s = sn;
  }
  return {p, d, s};
}

inline double legendre_p(int l, double x) { return legendre_triple(l, x).p; }

// ===========================================================================
// Spherical harmonics used here: zonal P_l(cos theta) about the z-axis and
// the highest-weight "beam" sin^l(theta) cos(l phi). The beam amplitude is
// evaluated in the log domain so l of a few hundred cannot underflow.
// ===========================================================================
enum class HarmonicKind { Zonal, Beam };

inline SampledField sphere_harmonic(std::shared_ptr<const ManifoldModel> man,
                                    std::shared_ptr<const Quadrature> quad,
                                    int l, HarmonicKind kind) {
  if (man->kind() != ManifoldKind::RoundSphere)
    throw domain_error("sphere_harmonic requires the round sphere");
  if (l < 1) throw domain_error("sphere_harmonic requires l >= 1");
  double lambda = static_cast<double>(l) * (l + 1);

  std::function<double(const Vec3&)> eval, lap;
  if (kind == HarmonicKind::Zonal) {
    eval = [l](const Vec3& p) { return legendre_p(l, p.z); };
    lap = [l](const Vec3& p) {
      auto t = legendre_triple(l, p.z);
      double x = p.z;
      return (1.0 - x * x) * t.d2p - 2.0 * x * t.dp;
    };
  } else {
    eval = [l](const Vec3& p) {
      double st2 = p.x * p.x + p.y * p.y;
      if (st2 <= 0.0) return 0.0;
      double phi = std::atan2(p.y, p.x);
      return std::exp(0.5 * l * std::log(st2)) * std::cos(l * phi);
    };
    lap = [l](const Vec3& p) {
      double st2 = p.x * p.x + p.y * p.y;
      if (st2 <= 0.0) return 0.0;
      double phi = std::atan2(p.y, p.x);
      double ct2 = p.z * p.z;
      double bracket = l * static_cast<double>(l) * ct2 - l * st2 -
                       l * static_cast<double>(l);
      return std::exp(0.5 * (l - 2) * std::log(st2)) * bracket *
             std::cos(l * phi);
    };
  }
  SampledField f;
  f.manifold = std::move(man);
  f.quad = std::move(quad);
  f.lambda = lambda;
  f.family = (kind == HarmonicKind::Zonal) ? "zonal" : "beam";
  f.values.resize(f.quad->size());
  for (std::size_t i = 0; i < f.quad->size(); ++i)
    f.values[i] = eval(f.quad->points[i]);
  f.evaluator = eval;
  f.laplacian = lap;
  return normalize_l2(std::move(f));
}

// ===========================================================================
// Deterministic random member of one eigenspace. Torus: seeded combination
// over the lattice shell |k|^2 = N. Sphere: zonal harmonic about a seeded
// random axis (the rotation orbit of P_l, valid members for any l).
// ===========================================================================
inline SampledField eigenspace_sample(std::shared_ptr<const ManifoldModel> man,
                                      std::shared_ptr<const Quadrature> quad,
                                      int eigen_index, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto gauss = [&rng]() {
    // Box-Muller on explicit uniforms: deterministic for a fixed seed.
    double u1 = (rng() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    double u2 = (rng() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  };
  if (man->kind() == ManifoldKind::FlatTorus) {
    if (eigen_index < 1) throw domain_error("eigenspace index must be >= 1");
    int n = man->dimension();
    int kmax = static_cast<int>(std::sqrt(static_cast<double>(eigen_index)));
    std::vector<std::vector<int>> shell;
    auto push = [&](std::vector<int> k) {
      // keep one representative of {k, -k}: first nonzero positive
      for (int v : k) {
        if (v > 0) {
          shell.push_back(std::move(k));
          return;
        }
        if (v < 0) return;
      }
    };
    if (n == 2) {
      for (int a = -kmax; a <= kmax; ++a)
        for (int b = -kmax; b <= kmax; ++b)
          if (a * a + b * b == eigen_index) push({a, b});
    } else {
      for (int a = -kmax; a <= kmax; ++a)
        for (int b = -kmax; b <= kmax; ++b)
          for (int c = -kmax; c <= kmax; ++c)
            if (a * a + b * b + c * c == eigen_index) push({a, b, c});
    }
    if (shell.empty())
      throw domain_error("no lattice vectors with |k|^2 = index");
    std::vector<double> ca(shell.size()), cb(shell.size());
    for (std::size_t i = 0; i < shell.size(); ++i) {
      ca[i] = gauss();
      cb[i] = gauss();
    }
    auto eval = [shell, ca, cb, n](const Vec3& p) {
      double v = 0.0;
      for (std::size_t i = 0; i < shell.size(); ++i) {
        double a = 0.0;
        for (int d = 0; d < n; ++d) a += shell[i][d] * p[d];
        v += ca[i] * std::cos(a) + cb[i] * std::sin(a);
      }
      return v;
    };
    double lambda = eigen_index;
    SampledField f;
    f.manifold = std::move(man);
    f.quad = std::move(quad);
    f.lambda = lambda;
    f.family = "torus-sample";
    f.values.resize(f.quad->size());
    for (std::size_t i = 0; i < f.quad->size(); ++i)
      f.values[i] = eval(f.quad->points[i]);
    f.evaluator = eval;
    f.laplacian = [eval, lambda](const Vec3& p) { return -lambda * eval(p); };
    return normalize_l2(std::move(f));
  }
  if (man->kind() == ManifoldKind::RoundSphere) {
    int l = eigen_index;
    if (l < 1) throw domain_error("eigenspace index must be >= 1");
    Vec3 axis{gauss(), gauss(), gauss()};
    axis = normalized(axis);
    auto eval = [l, axis](const Vec3& p) {
      return legendre_p(l, std::clamp(dot(p, axis), -1.0, 1.0));
    };
    SampledField f;
    f.manifold = std::move(man);
    f.quad = std::move(quad);
    f.lambda = static_cast<double>(l) * (l + 1);
    f.family = "sphere-sample";
    f.values.resize(f.quad->size());
    for (std::size_t i = 0; i < f.quad->size(); ++i)
      f.values[i] = eval(f.quad->points[i]);
    f.evaluator = eval;
    double lambda = f.lambda;
    f.laplacian = [l, axis, lambda](const Vec3& p) {
      double x = std::clamp(dot(p, axis), -1.0, 1.0);
      auto t = legendre_triple(l, x);
      return (1.0 - x * x) * t.d2p - 2.0 * x * t.dp;
    };
    return normalize_l2(std::move(f));
  }
  throw domain_error("eigenspace_sample supports torus and sphere manifolds");
}

}  // namespace nodal
