#pragma once

#include "nodal/covering.hpp"
#include "nodal/lp_norms.hpp"

namespace nodal {

// ===========================================================================
// d-good classification: a ball B_i is d-good when the mass over the double
// ball grows by at most 2^d, i.e. int_{2B_i} u^2 <= 2^d int_{B_i} u^2.
// G_d is the union of the good balls; union masses and volumes count every
// quadrature point once.
// ===========================================================================
struct BallStat {
  double mass_ball = 0.0;    // int_{B_i} u^2
  double mass_double = 0.0;  // int_{2B_i} u^2
  bool good = false;
};

struct GoodBallReport {
  double lambda = 0.0;
  double radius = 0.0;
  double d = 0.0;
  int c_m = 0;  // multiplicity used to choose d (0 when d was explicit)
  std::vector<BallStat> balls;
  int n_good = 0;
  double mass_good = 0.0;  // int_{G_d} u^2, union semantics
  double vol_good = 0.0;   // Vol(G_d)
  int zero_mass_warnings = 0;
};

inline double ball_mass(const SampledField& f, const Vec3& center, double r) {
  KahanSum s;
  bool any = false;
  ball_visit(*f.manifold, *f.quad, center, r, [&](std::size_t i) {
    any = true;
    s.add(f.quad->weights[i] * f.values[i] * f.values[i]);
  });
  if (!any) throw resolution_error("ball contains no quadrature point");
  return s.value();
}

// d_M with 2^{-d_M} C_M = 1/4.
inline double choose_d(double c_m) {
  if (!(c_m >= 1.0)) throw domain_error("choose_d requires C_M >= 1");
  return std::log2(4.0 * c_m);
}

inline GoodBallReport classify(const SampledField& f, const BallCover& cover,
                               double d) {
  if (!(d > 1.0)) throw domain_error("classify requires d > 1");
  const ManifoldModel& m = *f.manifold;
  const Quadrature& q = *f.quad;
  GoodBallReport rep;
  rep.lambda = f.lambda;
  rep.radius = cover.radius;
  rep.d = d;
  rep.balls.resize(cover.centers.size());
  double factor = std::exp2(d);
  for (std::size_t b = 0; b < cover.centers.size(); ++b) {
    KahanSum s1, s2;
    ball_visit(m, q, cover.centers[b], cover.radius, [&](std::size_t i) {
      s1.add(q.weights[i] * f.values[i] * f.values[i]);
    });
    ball_visit(m, q, cover.centers[b], 2.0 * cover.radius, [&](std::size_t i) {
      s2.add(q.weights[i] * f.values[i] * f.values[i]);
    });
    BallStat& st = rep.balls[b];
    st.mass_ball = s1.value();
    st.mass_double = s2.value();
    if (st.mass_ball == 0.0) {
      st.good = false;  // ratio test undefined; conservative for lower bounds
      ++rep.zero_mass_warnings;
    } else {
      st.good = st.mass_double <= factor * st.mass_ball;
    }
    if (st.good) ++rep.n_good;
  }
  std::vector<char> mark(q.size(), 0);
  for (std::size_t b = 0; b < cover.centers.size(); ++b) {
    if (!rep.balls[b].good) continue;
    ball_visit(m, q, cover.centers[b], cover.radius,
               [&mark](std::size_t i) { mark[i] = 1; });
  }
  KahanSum mass, vol;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!mark[i]) continue;
    mass.add(q.weights[i] * f.values[i] * f.values[i]);
    vol.add(q.weights[i]);
  }
  rep.mass_good = mass.value();
  rep.vol_good = vol.value();
  return rep;
}

// int_{G_d} u^2 >= 3/4 when d >= choose_d(measured C_M). Violations are
// reported, not thrown; the caller keeps the per-ball table for diagnosis.
struct MassCheck {
  double mass_good = 0.0;
  bool pass = false;
};

inline MassCheck good_mass_check(const GoodBallReport& rep) {
  return {rep.mass_good, rep.mass_good >= 0.75 - 0.01};
}

inline double concentration_volume(const SampledField& f,
                                   const BallCover& cover, double d) {
  return classify(f, cover, d).vol_good;
}

// Fit of the good-ball count against lambda over a family sweep.
inline ScalingFit count_good_scaling(
    const std::vector<GoodBallReport>& reports) {
  if (reports.size() < 5)
    throw insufficient_sweep_error(
        "count_good_scaling needs at least 5 sweep members");
  double lo = reports.front().lambda, hi = lo;
  std::vector<std::pair<double, double>> samples;
  for (const auto& r : reports) {
    lo = std::min(lo, r.lambda);
    hi = std::max(hi, r.lambda);
    samples.emplace_back(r.lambda, static_cast<double>(r.n_good));
  }
  if (hi < 8.0 * lo)
    throw insufficient_sweep_error("sweep must span a factor >= 8 in lambda");
  return loglog_fit(std::move(samples));
}

// Both sides of the Hoelder chain int_G u^2 <= Vol(G)^{(p-2)/p} ||u||_p^2
// with G the union of d-good balls.
struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline InequalityCheck holder_chain_check(const SampledField& f,
                                          const GoodBallReport& rep,
                                          double p) {
  if (!(p > 2.0)) throw domain_error("holder_chain_check requires p > 2");
  double np = lp_norm(f, p);
  return {rep.mass_good, std::pow(rep.vol_good, (p - 2.0) / p) * np * np};
}

// Sobolev-route bound int_G u^2 <= Vol(G)^{2/n} * lambda (n >= 3 only; the
// exponent p = 2n/(n-2) is undefined at n = 2).
inline InequalityCheck sobolev_check(const SampledField& f,
                                     const std::vector<std::uint32_t>& g) {
  int n = f.manifold->dimension();
  if (n < 3)
    throw domain_error("sobolev_check requires dimension n >= 3");
  KahanSum mass, vol;
  for (auto i : g) {
    mass.add(f.quad->weights[i] * f.values[i] * f.values[i]);
    vol.add(f.quad->weights[i]);
  }
  return {mass.value(), std::pow(vol.value(), 2.0 / n) * f.lambda};
}

}  // namespace nodal
