#pragma once

#include <utility>
#include <vector>

#include "nodal/common.hpp"

namespace nodal {

struct insufficient_sweep_error : error {
  using error::error;
};

// Least-squares power-law fit: log(value) = slope * log(lambda) + intercept.
struct ScalingFit {
  std::vector<std::pair<double, double>> samples;  // (lambda, value)
  double slope = 0.0;
  double intercept = 0.0;  // in log space
  double r2 = 1.0;
};

inline ScalingFit loglog_fit(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 3)
    throw insufficient_sweep_error("loglog_fit needs at least 3 samples");
  for (const auto& s : samples)
    if (!(s.first > 0) || !(s.second > 0))
      throw domain_error("loglog_fit requires positive samples");
  const std::size_t n = samples.size();
  double sx = 0, sy = 0;
  for (const auto& s : samples) {
    sx += std::log(s.first);
    sy += std::log(s.second);
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& s : samples) {
    double dx = std::log(s.first) - mx;
    double dy = std::log(s.second) - my;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  ScalingFit fit;
  fit.samples = std::move(samples);
  fit.slope = (sxx > 0) ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ssres = 0, sstot = 0;
  for (const auto& s : fit.samples) {
    double y = std::log(s.second);
    double yhat = fit.slope * std::log(s.first) + fit.intercept;
    ssres += (y - yhat) * (y - yhat);
    sstot += (y - my) * (y - my);
  }
  fit.r2 = (sstot > 0) ? 1.0 - ssres / sstot : 1.0;
  return fit;
}

}  // namespace nodal
