#include <gtest/gtest.h>

#include "nodal/eigenmodes.hpp"
#include "nodal/fit.hpp"

using namespace nodal;

namespace {

struct Setup {
  std::shared_ptr<const ManifoldModel> torus, torus3, sphere;
  std::shared_ptr<const Quadrature> tq, tq3, sq;
  Setup() {
    torus = std::make_shared<const ManifoldModel>(
        ManifoldModel::flat_torus({kTwoPi, kTwoPi}));
    torus3 = std::make_shared<const ManifoldModel>(
        ManifoldModel::flat_torus({kTwoPi, kTwoPi, kTwoPi}));
    sphere =
        std::make_shared<const ManifoldModel>(ManifoldModel::round_sphere());
    tq = std::make_shared<const Quadrature>(build_quadrature(*torus, 256));
    tq3 = std::make_shared<const Quadrature>(build_quadrature(*torus3, 48));
    sq = std::make_shared<const Quadrature>(build_quadrature(*sphere, 256));
  }
};

Setup& setup() {
  static Setup s;
  return s;
}

}  // namespace

TEST(TorusMode, SinXNormalization) {
  auto& s = setup();
  SampledField f = torus_mode(s.torus, s.tq, {1, 0}, {Phase::Sin, Phase::Sin});
  EXPECT_DOUBLE_EQ(f.lambda, 1.0);
  // closed-form integral of sin^2 over the torus is 2 pi^2, so the
  // normalized amplitude is 1/(pi sqrt(2))
  double amp = 1.0 / (kPi * std::sqrt(2.0));
  EXPECT_NEAR(f.evaluator({kPi / 2, 0.3, 0}), amp, 1e-12);
  EXPECT_NEAR(max_abs(f), amp, 1e-12);
}

TEST(TorusMode, LambdaIsKSquared) {
  auto& s = setup();
  SampledField f = torus_mode(s.torus, s.tq, {3, 4}, {Phase::Sin, Phase::Cos});
  EXPECT_DOUBLE_EQ(f.lambda, 25.0);
}

TEST(TorusMode, ThreeTorusNormalized) {
  auto& s = setup();
  SampledField f = torus_mode(s.torus3, s.tq3, {1, 1, 1},
                              {Phase::Sin, Phase::Sin, Phase::Sin});
  EXPECT_DOUBLE_EQ(f.lambda, 3.0);
  EXPECT_NEAR(integral_sq(f), 1.0, 1e-8);
  // oracle: product integral gives amplitude (1/pi)^{3/2}
  double amp = std::pow(kPi, -1.5);
  EXPECT_NEAR(f.evaluator({kPi / 2, kPi / 2, kPi / 2}), amp, 1e-12);
}

TEST(TorusMode, RejectsZeroModeAndWrongPeriods) {
  auto& s = setup();
  EXPECT_THROW(torus_mode(s.torus, s.tq, {0, 0}, {Phase::Sin, Phase::Sin}),
               domain_error);
  auto odd = std::make_shared<const ManifoldModel>(
      ManifoldModel::flat_torus({1.0, 1.0}));
  auto oq = std::make_shared<const Quadrature>(build_quadrature(*odd, 16));
  EXPECT_THROW(torus_mode(odd, oq, {1, 0}, {Phase::Sin, Phase::Sin}),
               domain_error);
}

TEST(SphereHarmonic, ZonalL1) {
  auto& s = setup();
  SampledField f = sphere_harmonic(s.sphere, s.sq, 1, HarmonicKind::Zonal);
  EXPECT_DOUBLE_EQ(f.lambda, 2.0);
  double amp = std::sqrt(3.0 / (4.0 * kPi));
  EXPECT_NEAR(f.evaluator({0, 0, 1}), amp, 1e-10);
  EXPECT_NEAR(f.evaluator({1, 0, 0}), 0.0, 1e-14);
}

TEST(SphereHarmonic, ZonalL2NodalLatitudes) {
  auto& s = setup();
  SampledField f = sphere_harmonic(s.sphere, s.sq, 2, HarmonicKind::Zonal);
  // oracle: roots of P_2 at cos(theta) = +-1/sqrt(3)
  double c = 1.0 / std::sqrt(3.0);
  double st = std::sqrt(1.0 - c * c);
  EXPECT_NEAR(f.evaluator({st, 0, c}), 0.0, 1e-12);
  EXPECT_NEAR(f.evaluator({st, 0, -c}), 0.0, 1e-12);
}

TEST(SphereHarmonic, BeamMaxOnEquator) {
  auto& s = setup();
  SampledField f = sphere_harmonic(s.sphere, s.sq, 40, HarmonicKind::Beam);
  EXPECT_DOUBLE_EQ(f.lambda, 1640.0);
  std::size_t arg = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (std::abs(f.values[i]) > best) {
      best = std::abs(f.values[i]);
      arg = i;
    }
  // max |u| attained on the row nearest the equator
  double zmin = 1.0;
  for (const auto& p : f.quad->points) zmin = std::min(zmin, std::abs(p.z));
  EXPECT_NEAR(std::abs(f.quad->points[arg].z), zmin, 1e-12);
}

TEST(SphereHarmonic, BeamLogDomainSurvivesLargeL) {
  auto& s = setup();
  SampledField f = sphere_harmonic(s.sphere, s.sq, 300, HarmonicKind::Beam);
  EXPECT_TRUE(std::isfinite(max_abs(f)));
  EXPECT_GT(max_abs(f), 0.0);
  EXPECT_NEAR(integral_sq(f), 1.0, 1e-8);
}

TEST(Normalize, ScalingAndIdempotence) {
  auto& s = setup();
  SampledField f = torus_mode(s.torus, s.tq, {2, 0}, {Phase::Sin, Phase::Sin});
  SampledField g = f;
  for (double& v : g.values) v *= 2.0;  // int g^2 = 4
  SampledField h = normalize_l2(g);
  for (std::size_t i = 0; i < h.values.size(); ++i)
    EXPECT_NEAR(h.values[i], g.values[i] / 2.0, 1e-14);
  SampledField again = normalize_l2(h);
  for (std::size_t i = 0; i < h.values.size(); ++i)
    EXPECT_NEAR(again.values[i], h.values[i], 1e-12 * max_abs(h));
}

TEST(Normalize, ZeroFieldThrows) {
  auto& s = setup();
  SampledField f;
  f.manifold = s.torus;
  f.quad = s.tq;
  f.values.assign(s.tq->size(), 0.0);
  EXPECT_THROW(normalize_l2(f), degenerate_field_error);
}

TEST(FieldInvariants, UnitMassAndZeroMean) {
  auto& s = setup();
  std::vector<SampledField> fields;
  for (int k : {1, 4, 16})
    fields.push_back(
        torus_mode(s.torus, s.tq, {k, 0}, {Phase::Sin, Phase::Sin}));
  for (int l : {2, 8, 31, 64}) {
    fields.push_back(sphere_harmonic(s.sphere, s.sq, l, HarmonicKind::Zonal));
    fields.push_back(sphere_harmonic(s.sphere, s.sq, l, HarmonicKind::Beam));
  }
  for (const auto& f : fields) {
    EXPECT_NEAR(integral_sq(f), 1.0, 1e-8) << f.family << " " << f.lambda;
    EXPECT_NEAR(integral(f), 0.0, 1e-6) << f.family << " " << f.lambda;
  }
}

TEST(FieldInvariants, ZonalBeamOrthogonality) {
  auto& s = setup();
  for (int l : {3, 12, 40}) {
    SampledField z = sphere_harmonic(s.sphere, s.sq, l, HarmonicKind::Zonal);
    SampledField b = sphere_harmonic(s.sphere, s.sq, l, HarmonicKind::Beam);
    KahanSum ip;
    for (std::size_t i = 0; i < z.values.size(); ++i)
      ip.add(z.quad->weights[i] * z.values[i] * b.values[i]);
    EXPECT_NEAR(ip.value(), 0.0, 1e-6) << "l = " << l;
  }
}

TEST(FieldInvariants, RayleighResidualSpotCheck) {
  auto& s = setup();
  std::vector<SampledField> fields = {
      torus_mode(s.torus, s.tq, {5, 2}, {Phase::Sin, Phase::Cos}),
      sphere_harmonic(s.sphere, s.sq, 24, HarmonicKind::Zonal),
      sphere_harmonic(s.sphere, s.sq, 24, HarmonicKind::Beam)};
  std::mt19937_64 rng(11);
  auto uni = [&rng](double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
  };
  for (const auto& f : fields) {
    double scale = f.lambda * max_abs(f);
    for (int t = 0; t < 100; ++t) {
      Vec3 p;
      if (f.manifold->kind() == ManifoldKind::FlatTorus)
        p = {uni(0, kTwoPi), uni(0, kTwoPi), 0};
      else
        p = normalized({uni(-1, 1), uni(-1, 1), uni(-1, 1)});
      double resid = f.laplacian(p) + f.lambda * f.evaluator(p);
      EXPECT_LE(std::abs(resid), 1e-6 * scale) << f.family;
    }
  }
}

TEST(FieldInvariants, BeamConcentrationVolumeScaling) {
  auto& s = setup();
  std::vector<std::pair<double, double>> samples;
  for (int l : {8, 16, 24, 32, 48, 64}) {
    SampledField f = sphere_harmonic(s.sphere, s.sq, l, HarmonicKind::Beam);
    double thresh = 0.1 * max_abs(f);
    KahanSum vol;
    for (std::size_t i = 0; i < f.values.size(); ++i)
      if (std::abs(f.values[i]) > thresh) vol.add(f.quad->weights[i]);
    samples.emplace_back(f.lambda, vol.value());
  }
  ScalingFit fit = loglog_fit(samples);
  EXPECT_NEAR(fit.slope, -0.25, 0.05);
}

TEST(EigenspaceSample, DeterministicAndValid) {
  auto& s = setup();
  SampledField a = eigenspace_sample(s.torus, s.tq, 1, 42);
  SampledField b = eigenspace_sample(s.torus, s.tq, 1, 42);
  ASSERT_EQ(a.values.size(), b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    EXPECT_EQ(a.values[i], b.values[i]);  // bit-for-bit
  SampledField c = eigenspace_sample(s.torus, s.tq, 1, 43);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    diff = std::max(diff, std::abs(a.values[i] - c.values[i]));
  EXPECT_GT(diff, 1e-3);
  EXPECT_NEAR(integral_sq(a), 1.0, 1e-8);
  // still an eigenfunction of the right eigenvalue
  EXPECT_NEAR(
      a.laplacian({1.0, 2.0, 0}) + a.lambda * a.evaluator({1.0, 2.0, 0}), 0.0,
      1e-10);
}

TEST(EigenspaceSample, SphereAxisSample) {
  auto& s = setup();
  SampledField f = eigenspace_sample(s.sphere, s.sq, 1, 99);
  EXPECT_DOUBLE_EQ(f.lambda, 2.0);
  EXPECT_NEAR(integral_sq(f), 1.0, 1e-8);
  // an l = 1 sample is the cosine of the angle to some axis, so its max
  // equals the zonal amplitude sqrt(3/4pi) up to grid capture
  EXPECT_NEAR(max_abs(f), std::sqrt(3.0 / (4.0 * kPi)), 1e-3);
}

TEST(Legendre, TripleMatchesOdeAndValues) {
  // P_2(x) = (3x^2 - 1)/2, P_2' = 3x, P_2'' = 3
  auto t = legendre_triple(2, 0.37);
  EXPECT_NEAR(t.p, 0.5 * (3 * 0.37 * 0.37 - 1), 1e-15);
  EXPECT_NEAR(t.dp, 3 * 0.37, 1e-15);
  EXPECT_NEAR(t.d2p, 3.0, 1e-15);
  for (int l : {5, 20, 101}) {
    for (double x : {-0.9, -0.3, 0.2, 0.77}) {
      auto tr = legendre_triple(l, x);
      double ode = (1 - x * x) * tr.d2p - 2 * x * tr.dp + l * (l + 1.0) * tr.p;
      EXPECT_NEAR(ode, 0.0, 1e-9 * l * (l + 1.0));
    }
    EXPECT_NEAR(legendre_p(l, 1.0), 1.0, 1e-12);
  }
}
