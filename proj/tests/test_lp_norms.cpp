#include <gtest/gtest.h>

#include "nodal/lp_norms.hpp"

using namespace nodal;

namespace {

struct Setup {
  std::shared_ptr<const ManifoldModel> torus, sphere;
  std::shared_ptr<const Quadrature> tq, sq;
  Setup() {
    torus = std::make_shared<const ManifoldModel>(
        ManifoldModel::flat_torus({kTwoPi, kTwoPi}));
    sphere =
        std::make_shared<const ManifoldModel>(ManifoldModel::round_sphere());
    tq = std::make_shared<const Quadrature>(build_quadrature(*torus, 256));
    sq = std::make_shared<const Quadrature>(build_quadrature(*sphere, 256));
  }
};

Setup& setup() {
  static Setup s;
  return s;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST(LpNorm, NormalizationAndClosedForm) {
  auto& s = setup();
  SampledField f = torus_mode(s.torus, s.tq, {1, 0}, {Phase::Sin, Phase::Sin});
  EXPECT_NEAR(lp_norm(f, 2.0), 1.0, 1e-8);
  // closed form: int sin^4 = (3/4) pi over [0, 2pi), so int u^4 = 3/(8 pi^2)
  EXPECT_NEAR(lp_norm(f, 4.0), std::pow(3.0 / (8.0 * kPi * kPi), 0.25), 1e-10);
  EXPECT_THROW(lp_norm(f, 0.5), domain_error);
}

TEST(LpNorm, ConstantFieldOnSphere) {
  auto& s = setup();
  SampledField c;
  c.manifold = s.sphere;
  c.quad = s.sq;
  c.lambda = 1.0;
  c.values.assign(s.sq->size(), 0.3);
  for (double p : {1.0, 2.0, 4.0})
    EXPECT_NEAR(lp_norm(c, p), 0.3 * std::pow(4.0 * kPi, 1.0 / p), 1e-10);
  EXPECT_NEAR(lp_norm(c, kInf), 0.3, 1e-15);
}

TEST(SoggeExponent, PaperValues) {
  EXPECT_NEAR(sogge_exponent(2, 6.0), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(sogge_exponent(3, 4.0), 1.0 / 8.0, 1e-15);
  EXPECT_NEAR(sogge_exponent(2, 10.0), 3.0 / 20.0, 1e-15);
  EXPECT_NEAR(sogge_exponent(2, kInf), 0.25, 1e-15);
}

TEST(SoggeExponent, ContinuityAtCriticalP) {
  for (int n : {2, 3, 4, 5, 6}) {
    double pc = critical_p(n);
    double upper = (n * (pc - 2.0) - pc) / (4.0 * pc);
    double lower = (n - 1.0) * (pc - 2.0) / (8.0 * pc);
    EXPECT_NEAR(upper, lower, 1e-12) << "n = " << n;
    EXPECT_NEAR(sogge_exponent(n, pc), upper, 1e-12);
  }
}

TEST(CriticalP, ValuesAndLimit) {
  EXPECT_DOUBLE_EQ(critical_p(2), 6.0);
  EXPECT_DOUBLE_EQ(critical_p(3), 4.0);
  double prev = critical_p(2);
  for (int n = 3; n <= 50; ++n) {
    double pc = critical_p(n);
    EXPECT_LT(pc, prev);
    EXPECT_GT(pc, 2.0);
    prev = pc;
  }
  EXPECT_NEAR(critical_p(2001), 2.0, 2e-3);
}

TEST(PowerMeanMonotonicity, NormalizedNormsNondecreasing) {
  auto& s = setup();
  std::vector<SampledField> fields = {
      torus_mode(s.torus, s.tq, {4, 0}, {Phase::Sin, Phase::Sin}),
      sphere_harmonic(s.sphere, s.sq, 8, HarmonicKind::Zonal),
      sphere_harmonic(s.sphere, s.sq, 8, HarmonicKind::Beam)};
  for (const auto& f : fields) {
    double vol = f.manifold->volume();
    double prev = 0.0;
    for (double p : {2.0, 4.0, 6.0}) {
      double v = lp_norm(f, p) / std::pow(vol, 1.0 / p);
      EXPECT_GE(v, prev - 1e-12) << f.family << " p=" << p;
      prev = v;
    }
    EXPECT_GE(lp_norm(f, kInf), prev - 1e-12) << f.family;
  }
}

TEST(LpScaling, SoggeBoundHoldsPerFamily) {
  auto& s = setup();
  const int ls[] = {8, 16, 24, 32, 48, 64};
  for (auto kind : {HarmonicKind::Zonal, HarmonicKind::Beam}) {
    std::map<double, std::vector<std::pair<double, double>>> samples;
    for (int l : ls) {
      SampledField f = sphere_harmonic(s.sphere, s.sq, l, kind);
      for (double p : {4.0, 6.0, 8.0, kInf})
        samples[p].emplace_back(f.lambda, lp_norm(f, p));
    }
    for (auto& kv : samples) {
      ScalingFit fit = lp_scaling(kv.second);
      EXPECT_LE(fit.slope, sogge_exponent(2, kv.first) + 0.03)
          << (kind == HarmonicKind::Zonal ? "zonal" : "beam")
          << " p = " << kv.first;
    }
  }
}

TEST(LpScaling, InsufficientSweepErrors) {
  std::vector<std::pair<double, double>> few = {{1, 1}, {2, 1}, {4, 1}, {8, 1}};
  EXPECT_THROW(lp_scaling(few), insufficient_sweep_error);
  std::vector<std::pair<double, double>> narrow = {
      {10, 1}, {12, 1}, {14, 1}, {16, 1}, {18, 1}};
  EXPECT_THROW(lp_scaling(narrow), insufficient_sweep_error);
}
