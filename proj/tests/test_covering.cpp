#include <gtest/gtest.h>

#include "nodal/covering.hpp"

using namespace nodal;

namespace {

struct Setup {
  std::shared_ptr<const ManifoldModel> torus, sphere;
  std::shared_ptr<const Quadrature> tq128, sq128;
  Setup() {
    torus = std::make_shared<const ManifoldModel>(
        ManifoldModel::flat_torus({kTwoPi, kTwoPi}));
    sphere =
        std::make_shared<const ManifoldModel>(ManifoldModel::round_sphere());
    tq128 = std::make_shared<const Quadrature>(build_quadrature(*torus, 128));
    sq128 = std::make_shared<const Quadrature>(build_quadrature(*sphere, 128));
  }
};

Setup& setup() {
  static Setup s;
  return s;
}

SampledField torus_sin_kx(const Setup& s, int k,
                          std::shared_ptr<const Quadrature> q = nullptr) {
  return torus_mode(s.torus, q ? q : s.tq128, {k, 0},
                    {Phase::Sin, Phase::Sin});
}

}  // namespace

TEST(BuildCover, HugeRadiusGivesSingleBall) {
  auto& s = setup();
  BallCover cover = build_cover(*s.torus, *s.tq128, 5.0);  // > diameter
  EXPECT_EQ(cover.centers.size(), 1u);
  EXPECT_TRUE(covering_certificate(*s.torus, *s.tq128, cover));
}

TEST(BuildCover, TorusRadiusPi) {
  auto& s = setup();
  BallCover cover = build_cover(*s.torus, *s.tq128, kPi);
  EXPECT_GE(cover.centers.size(), 2u);
  EXPECT_LE(cover.centers.size(), 4u);
  // brute-force covering oracle
  for (const auto& p : s.tq128->points) {
    double best = 1e300;
    for (const auto& c : cover.centers)
      best = std::min(best, s.torus->distance(p, c));
    ASSERT_LE(best, kPi);
  }
}

TEST(BuildCover, SphereHalfPi) {
  auto& s = setup();
  BallCover cover = build_cover(*s.sphere, *s.sq128, kPi / 2);
  for (std::size_t i = 0; i < cover.centers.size(); ++i)
    for (std::size_t j = i + 1; j < cover.centers.size(); ++j)
      EXPECT_GE(s.sphere->distance(cover.centers[i], cover.centers[j]),
                kPi / 2 - 1e-12);
  for (const auto& p : s.sq128->points) {
    double best = 1e300;
    for (const auto& c : cover.centers)
      best = std::min(best, s.sphere->distance(p, c));
    ASSERT_LE(best, kPi / 2);
  }
}

TEST(BuildCover, PackingSeparationExact) {
  auto& s = setup();
  double r = kPi / 8;
  BallCover cover = build_cover(*s.torus, *s.tq128, r);
  for (std::size_t i = 0; i < cover.centers.size(); ++i)
    for (std::size_t j = i + 1; j < cover.centers.size(); ++j)
      ASSERT_GE(s.torus->distance(cover.centers[i], cover.centers[j]),
                r - 1e-13);
  EXPECT_TRUE(covering_certificate(*s.torus, *s.tq128, cover));
}

TEST(BuildCover, ResolutionPreconditionEnforced) {
  auto& s = setup();
  auto coarse = build_quadrature(*s.torus, 16);
  // spacing 2 pi / 16 = 0.3927 needs r > 1.57
  EXPECT_THROW(build_cover(*s.torus, coarse, 1.0), resolution_error);
  EXPECT_THROW(build_cover(*s.torus, *s.tq128, -1.0), domain_error);
}

TEST(Multiplicity, SingleBallIsOne) {
  auto& s = setup();
  BallCover cover = build_cover(*s.torus, *s.tq128, 5.0);
  EXPECT_EQ(overlap_multiplicity(*s.torus, *s.tq128, cover), 1);
  EXPECT_EQ(cover.multiplicity_histogram.back(),
            static_cast<std::int64_t>(s.tq128->size()));
}

TEST(Multiplicity, MatchesBruteForceCount) {
  auto& s = setup();
  double r = kPi / 8;
  BallCover cover = build_cover(*s.torus, *s.tq128, r);
  int maxm = overlap_multiplicity(*s.torus, *s.tq128, cover);
  EXPECT_LE(maxm, 36);  // flat Euclidean packing bound
  // oracle: direct count at every grid point
  int brute_max = 0;
  std::vector<std::int64_t> hist(maxm + 2, 0);
  for (const auto& p : s.tq128->points) {
    int c = 0;
    for (const auto& ctr : cover.centers)
      if (s.torus->distance(p, ctr) <= 2 * r) ++c;
    brute_max = std::max(brute_max, c);
    ASSERT_LE(c, maxm);
    ++hist[c];
  }
  EXPECT_EQ(brute_max, maxm);
  for (int m = 0; m <= maxm; ++m)
    EXPECT_EQ(hist[m], cover.multiplicity_histogram[m]) << "m = " << m;
}

TEST(Multiplicity, StableUnderResolutionDoubling) {
  auto& s = setup();
  double r = kPi / 8;
  auto q256 = build_quadrature(*s.torus, 256);
  BallCover c1 = build_cover(*s.torus, *s.tq128, r);
  BallCover c2 = build_cover(*s.torus, q256, r);
  int m1 = overlap_multiplicity(*s.torus, *s.tq128, c1);
  int m2 = overlap_multiplicity(*s.torus, q256, c2);
  EXPECT_LE(std::abs(m1 - m2), 1);
}

TEST(ZeroSpacing, TorusSinKxIsThreePiOverTwo) {
  auto& s = setup();
  for (int k : {4, 8}) {
    SampledField f = torus_sin_kx(s, k);
    double a = zero_spacing_scale(f);
    EXPECT_NEAR(a, 1.5 * kPi, 0.02 * 1.5 * kPi) << "k = " << k;
  }
}

TEST(ZeroSpacing, SphereZonalL1) {
  auto& s = setup();
  SampledField f = sphere_harmonic(s.sphere, s.sq128, 1, HarmonicKind::Zonal);
  // oracle: farthest points are the poles, distance pi/2 from the equator
  double a = zero_spacing_scale(f);
  EXPECT_NEAR(a, 3.0 * std::sqrt(2.0) * kPi / 2.0, 0.02 * 6.66);
}

TEST(ZeroSpacing, PositiveAndErrorPaths) {
  auto& s = setup();
  SampledField f = torus_sin_kx(s, 4);
  EXPECT_GT(zero_spacing_scale(f), 0.0);
  SampledField constant;
  constant.manifold = s.torus;
  constant.quad = s.tq128;
  constant.values.assign(s.tq128->size(), 1.0);
  constant.lambda = 4.0;
  EXPECT_THROW(zero_spacing_scale(constant), no_nodal_set_error);
  SampledField low = f;
  low.lambda = 0.5;
  EXPECT_THROW(zero_spacing_scale(low), domain_error);
}

TEST(ZeroSet, ExactGridZerosBecomeVertices) {
  auto& s = setup();
  // sin(4x) at res 128 hits exact zeros where 4x is a multiple of pi and
  // the grid point interpolation keeps the zero set on those columns
  SampledField f = torus_sin_kx(s, 4);
  ZeroSet z = build_zero_set(f);
  ASSERT_FALSE(z.points.empty());
  for (const auto& p : z.points) {
    double v = std::abs(f.evaluator(p));
    EXPECT_LE(v, 1e-10 * max_abs(f));
  }
}

TEST(WavelengthRadius, FormulaAndErrors) {
  EXPECT_DOUBLE_EQ(wavelength_radius(3.0, 9.0), 1.0);
  double k = 5.0;
  EXPECT_NEAR(wavelength_radius(1.5 * kPi, k * k), 1.5 * kPi / k, 1e-15);
  EXPECT_DOUBLE_EQ(wavelength_radius(2.5, 1.0), 2.5);
  EXPECT_THROW(wavelength_radius(2.5, 0.5), domain_error);
  EXPECT_THROW(wavelength_radius(-1.0, 4.0), domain_error);
}

TEST(ZeroSpacing, LambdaIndependenceAcrossFamily) {
  auto& s = setup();
  double lo = 1e300, hi = 0.0;
  for (int k : {4, 8, 16, 32}) {
    double a = zero_spacing_scale(torus_sin_kx(s, k));
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  EXPECT_LE(hi / lo, 2.0);
}
