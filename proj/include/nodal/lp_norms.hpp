#pragma once

#include <limits>

#include "nodal/eigenmodes.hpp"
#include "nodal/fit.hpp"

namespace nodal {

// Quadrature L^p norm; p = infinity is the max over quadrature points (a
// documented under-estimate of the sup that shrinks with resolution).
inline double lp_norm(const SampledField& f, double p) {
  if (std::isinf(p)) return max_abs(f);
  if (!(p >= 1.0)) throw domain_error("lp_norm requires p >= 1");
  KahanSum s;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    s.add(f.quad->weights[i] * std::pow(std::abs(f.values[i]), p));
  return std::pow(s.value(), 1.0 / p);
}

// The critical exponent 2(n+1)/(n-1) where the two eigenfunction L^p
// regimes meet.
inline double critical_p(int n) {
  if (n < 2) throw domain_error("critical_p requires n >= 2");
  return 2.0 * (n + 1) / (n - 1);
}

// Exponent e(n,p) in ||u||_p <= C lambda^{e(n,p)}:
//   (n(p-2) - p) / (4p)   for p >= 2(n+1)/(n-1)
//   (n-1)(p-2) / (8p)     for p <= 2(n+1)/(n-1)
// Both branches agree at the critical exponent.
inline double sogge_exponent(int n, double p) {
  if (n < 2) throw domain_error("sogge_exponent requires n >= 2");
  if (std::isinf(p)) return (n - 1.0) / 4.0;  // limit of the upper branch
  if (!(p >= 2.0)) throw domain_error("sogge_exponent requires p >= 2");
  if (p >= critical_p(n)) return (n * (p - 2.0) - p) / (4.0 * p);
  return (n - 1.0) * (p - 2.0) / (8.0 * p);
}

// Fit of measured norms against lambda over a family sweep.
inline ScalingFit lp_scaling(
    const std::vector<std::pair<double, double>>& lambda_norm) {
  if (lambda_norm.size() < 5)
    throw insufficient_sweep_error("lp_scaling needs at least 5 samples");
  double lo = lambda_norm.front().first, hi = lo;
  for (const auto& s : lambda_norm) {
    lo = std::min(lo, s.first);
    hi = std::max(hi, s.first);
  }
  if (hi < 8.0 * lo)
    throw insufficient_sweep_error("lp_scaling sweep must span a factor >= 8");
  return loglog_fit(lambda_norm);
}

}  // namespace nodal
