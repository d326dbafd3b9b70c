#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "nodal/geometry.hpp"

using namespace nodal;

namespace {

std::shared_ptr<const ManifoldModel> torus2() {
  return std::make_shared<const ManifoldModel>(
      ManifoldModel::flat_torus({kTwoPi, kTwoPi}));
}

std::shared_ptr<const ManifoldModel> sphere() {
  return std::make_shared<const ManifoldModel>(ManifoldModel::round_sphere());
}

Vec3 sph(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

}  // namespace

TEST(Distance, TorusHalfPeriod) {
  auto m = torus2();
  EXPECT_NEAR(m->distance({0, 0, 0}, {kPi, 0, 0}), kPi, 1e-12);
}

TEST(Distance, TorusWraparound) {
  auto m = torus2();
  EXPECT_NEAR(m->distance({0.1, 0, 0}, {kTwoPi - 0.1, 0, 0}), 0.2, 1e-12);
}

TEST(Distance, SphereAntipodal) {
  auto m = sphere();
  EXPECT_NEAR(m->distance({0, 0, 1}, {0, 0, -1}), kPi, 1e-12);
}

TEST(Distance, SphereRejectsOffSpherePoints) {
  auto m = sphere();
  EXPECT_THROW(m->distance({0, 0, 1.001}, {0, 0, 1}), invalid_point_error);
}

TEST(Distance, MetricAxiomsOnRandomTriples) {
  std::mt19937_64 rng(7);
  auto torus = torus2();
  auto sph_m = sphere();
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
  };
  for (int t = 0; t < 1000; ++t) {
    Vec3 a{uniform(0, kTwoPi), uniform(0, kTwoPi), 0};
    Vec3 b{uniform(0, kTwoPi), uniform(0, kTwoPi), 0};
    Vec3 c{uniform(0, kTwoPi), uniform(0, kTwoPi), 0};
    double ab = torus->distance(a, b), ba = torus->distance(b, a);
    EXPECT_EQ(ab, ba);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, torus->distance(a, c) + torus->distance(c, b) + 1e-10);

    Vec3 sa = normalized({uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)});
    Vec3 sb = normalized({uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)});
    Vec3 sc = normalized({uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)});
    double sab = sph_m->distance(sa, sb);
    EXPECT_EQ(sab, sph_m->distance(sb, sa));
    EXPECT_LE(sab, sph_m->distance(sa, sc) + sph_m->distance(sc, sb) + 1e-10);
  }
}

TEST(Distance, ZeroIffEqual) {
  auto m = torus2();
  Vec3 p{1.0, 2.0, 0};
  EXPECT_EQ(m->distance(p, p), 0.0);
  EXPECT_GT(m->distance(p, {1.0, 2.1, 0}), 1e-12);
}

TEST(Quadrature, TorusUniformGrid) {
  auto m = torus2();
  Quadrature q = build_quadrature(*m, 64);
  EXPECT_EQ(q.size(), 4096u);
  double w = kTwoPi / 64;
  for (double wi : q.weights) EXPECT_DOUBLE_EQ(wi, w * w);
  KahanSum s;
  for (double wi : q.weights) s.add(wi);
  EXPECT_NEAR(s.value(), m->volume(), 1e-10 * m->volume());
}

TEST(Quadrature, SphereTotalWeight) {
  auto m = sphere();
  for (int res : {16, 64, 256}) {
    Quadrature q = build_quadrature(*m, res);
    KahanSum s;
    for (double wi : q.weights) s.add(wi);
    EXPECT_NEAR(s.value(), 4 * kPi, 1e-10 * 4 * kPi) << "res " << res;
    for (double wi : q.weights) EXPECT_GT(wi, 0.0);
  }
}

TEST(Quadrature, MeshWeightsMatchAreaOracle) {
  TriMesh mesh = icosphere(3);
  auto m = std::make_shared<const ManifoldModel>(
      ManifoldModel::mesh_surface(mesh));
  Quadrature q = build_quadrature(*m, 8);
  // oracle: independent per-triangle area accumulation
  double oracle = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3& a = mesh.vertices[mesh.faces[f][0]];
    const Vec3& b = mesh.vertices[mesh.faces[f][1]];
    const Vec3& c = mesh.vertices[mesh.faces[f][2]];
    oracle += 0.5 * norm(cross(b - a, c - a));
  }
  KahanSum s;
  for (double wi : q.weights) s.add(wi);
  EXPECT_NEAR(s.value(), oracle, 1e-12 * oracle);
}

TEST(Quadrature, RejectsTooCoarse) {
  auto m = torus2();
  EXPECT_THROW(build_quadrature(*m, 7), config_error);
}

TEST(BallVolume, TorusFlatDisk) {
  auto m = torus2();
  Quadrature q = build_quadrature(*m, 256);
  double r = 0.5;
  double v = ball_volume(*m, q, {1.0, 1.0, 0}, r);
  EXPECT_NEAR(v, kPi * r * r, 0.02 * kPi * r * r);
}

TEST(BallVolume, SphereWholeAndHemisphere) {
  auto m = sphere();
  Quadrature q = build_quadrature(*m, 256);
  EXPECT_NEAR(ball_volume(*m, q, {0, 0, 1}, kPi), 4 * kPi, 1e-8);
  double hemi = ball_volume(*m, q, {0, 0, 1}, kPi / 2);
  EXPECT_NEAR(hemi, 2 * kPi, 0.01 * 2 * kPi);
}

TEST(BallVolume, MonotoneInRadius) {
  auto m = sphere();
  Quadrature q = build_quadrature(*m, 64);
  Vec3 p = sph(1.1, 2.2);
  double prev = 0.0;
  for (double r = 0.1; r < 3.2; r += 0.1) {
    double v = ball_volume(*m, q, p, r);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(BishopGromov, FlatRatioIsHundred) {
  auto m = torus2();
  Quadrature q = build_quadrature(*m, 256);
  double ratio = bishop_gromov_ratio(*m, q, {3.0, 3.0, 0}, 0.35);
  EXPECT_NEAR(ratio, 100.0, 5.0);
}

TEST(BishopGromov, SphereSmallRadiusLimit) {
  auto m = sphere();
  Quadrature q = build_quadrature(*m, 512);
  double ratio = bishop_gromov_ratio(*m, q, sph(1.3, 0.4), 0.05);
  EXPECT_NEAR(ratio, 100.0, 5.0);
}

TEST(BishopGromov, PositiveCurvatureDecreasesRatio) {
  auto m = sphere();
  Quadrature q = build_quadrature(*m, 256);
  double ratio = bishop_gromov_ratio(*m, q, sph(1.3, 0.4), 0.3);
  // closed-form oracle: area(B_s) = 2 pi (1 - cos s)
  double oracle = (1 - std::cos(1.5)) / (1 - std::cos(0.15));
  EXPECT_LE(ratio, 100.0);
  EXPECT_NEAR(ratio, oracle, 0.05 * oracle);
}

TEST(BishopGromov, SphereAreaRatioMonotone) {
  // Vol(B_s) / (2 pi (1 - cos s)) non-increasing in s
  auto m = sphere();
  Quadrature q = build_quadrature(*m, 256);
  Vec3 p = sph(0.9, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double s = 0.2; s < 3.0; s += 0.2) {
    double ratio = ball_volume(*m, q, p, s) / (kTwoPi * (1 - std::cos(s)));
    EXPECT_LE(ratio, prev + 1e-3);
    prev = ratio;
  }
}

TEST(BishopGromov, EmptyInnerBallThrows) {
  auto m = torus2();
  Quadrature q = build_quadrature(*m, 8);
  // r/2 = 0.005 is far below the grid spacing 2 pi / 8, but a grid point
  // sits at the ball center; center off-grid instead
  EXPECT_THROW(bishop_gromov_ratio(*m, q, {0.3, 0.3, 0}, 0.01),
               resolution_error);
}

TEST(DistanceDefect, FlatTorusVanishes) {
  auto m = torus2();
  for (double s : {0.1, 1.0, 3.0})
    EXPECT_EQ(laplacian_of_distance_defect(*m, s), 0.0);
}

TEST(DistanceDefect, SphereClosedForms) {
  auto m = sphere();
  EXPECT_NEAR(laplacian_of_distance_defect(*m, kPi / 2), 2.0 / kPi, 1e-12);
  // series oracle at s = 0.1: |cot(0.1) - 10|
  double oracle = std::abs(std::cos(0.1) / std::sin(0.1) - 10.0);
  EXPECT_NEAR(laplacian_of_distance_defect(*m, 0.1), oracle, 1e-12);
  EXPECT_NEAR(oracle, 0.0334, 5e-4);
}

TEST(DistanceDefect, MonotoneAndVanishingAtZero) {
  auto m = sphere();
  double prev = 0.0;
  for (double s = 0.05; s < kPi; s += 0.05) {
    double h = laplacian_of_distance_defect(*m, s);
    EXPECT_GE(h, prev - 1e-12);
    prev = h;
  }
  EXPECT_LT(laplacian_of_distance_defect(*m, 1e-4), 1e-4);
  EXPECT_THROW(laplacian_of_distance_defect(*m, kPi), domain_error);
}

TEST(BallQueries, MatchBruteForce) {
  auto m = sphere();
  Quadrature q = build_quadrature(*m, 48);
  for (Vec3 c : {sph(0.01, 0.0), sph(1.2, 3.0), sph(3.1, 5.0)}) {
    for (double r : {0.2, 1.0, 2.5}) {
      auto ids = ball_points(*m, q, c, r);
      std::vector<std::uint32_t> brute;
      for (std::size_t i = 0; i < q.size(); ++i)
        if (m->distance(q.points[i], c) <= r)
          brute.push_back(static_cast<std::uint32_t>(i));
      EXPECT_EQ(ids, brute) << "r=" << r;
    }
  }
  auto t = torus2();
  Quadrature tq = build_quadrature(*t, 48);
  for (Vec3 c : {Vec3{0.05, 6.2, 0}, Vec3{3.0, 3.0, 0}}) {
    for (double r : {0.3, 1.5}) {
      auto ids = ball_points(*t, tq, c, r);
      std::vector<std::uint32_t> brute;
      for (std::size_t i = 0; i < tq.size(); ++i)
        if (t->distance(tq.points[i], c) <= r)
          brute.push_back(static_cast<std::uint32_t>(i));
      EXPECT_EQ(ids, brute) << "r=" << r;
    }
  }
}

TEST(Off, RoundTripAndValidation) {
  TriMesh mesh = icosphere(1);
  std::stringstream ss;
  write_off(mesh, ss);
  TriMesh back = read_off(ss);
  ASSERT_EQ(back.vertices.size(), mesh.vertices.size());
  ASSERT_EQ(back.faces.size(), mesh.faces.size());
  EXPECT_NEAR(back.total_area(), mesh.total_area(), 1e-12);

  std::stringstream bad("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n");
  EXPECT_THROW(read_off(bad), mesh_error);
}

TEST(Icosphere, VertexCountAndClosed) {
  TriMesh mesh = icosphere(2);
  EXPECT_EQ(mesh.vertices.size(), 162u);  // 10*4^2 + 2
  EXPECT_TRUE(mesh.is_closed());
  for (const auto& v : mesh.vertices) EXPECT_NEAR(norm(v), 1.0, 1e-12);
}
