#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "topovox/delaunay.hpp"
#include "topovox/error.hpp"

using namespace topovox;

namespace {

PointCloud cloud(std::size_t dim, std::vector<double> coords) {
  PointCloud c;
  c.dim = dim;
  c.coords = std::move(coords);
  return c;
}

PointCloud random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud c;
  c.dim = dim;
  for (std::size_t i = 0; i < n * dim; ++i) c.coords.push_back(u(rng));
  return c;
}

std::set<std::array<std::uint32_t, 3>> triangles(const Triangulation& t) {
  std::set<std::array<std::uint32_t, 3>> out;
  for (const auto& c : t.cells) {
    std::array<std::uint32_t, 3> tri{c[0], c[1], c[2]};
    std::sort(tri.begin(), tri.end());
    out.insert(tri);
  }
  return out;
}

}  // namespace

TEST(Delaunay, ThreePointsOneTriangle) {
  const auto t = delaunay(cloud(2, {0, 0, 1, 0, 0, 1}));
  ASSERT_EQ(t.dim, 2u);
  ASSERT_EQ(t.cells.size(), 1u);
  EXPECT_EQ(t.cells[0][0], 0u);
  EXPECT_EQ(t.cells[0][1], 1u);
  EXPECT_EQ(t.cells[0][2], 2u);
}

TEST(Delaunay, ConvexQuadrilateralUsesDelaunayDiagonal) {
  const auto c = cloud(2, {0, 0, 3, 0, 3.2, 1, 0.1, 1.1});
  const auto t = delaunay(c);
  ASSERT_EQ(t.cells.size(), 2u);
  const auto ref = oracle::delaunay_2d_bruteforce(c);
  const std::set<std::array<std::uint32_t, 3>> expected(ref.begin(), ref.end());
  EXPECT_EQ(triangles(t), expected);
}

TEST(Delaunay, RandomCloudsMatchEmptyCircleOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = random_cloud(25, 2, seed);
    const auto ref = oracle::delaunay_2d_bruteforce(c);
    const std::set<std::array<std::uint32_t, 3>> expected(ref.begin(), ref.end());
    EXPECT_EQ(triangles(delaunay(c)), expected) << seed;
  }
}

TEST(Delaunay, UnitCubeVolume) {
  PointCloud c;
  c.dim = 3;
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < 3; ++k) c.coords.push_back((i >> k) & 1);
  const auto t = delaunay(c);
  ASSERT_EQ(t.dim, 3u);
  double volume = 0;
  for (const auto& cell : t.cells) {
    const auto a = t.vertices.point(cell[0]);
    double m[3][3];
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) m[r][k] = t.vertices.point(cell[r + 1])[k] - a[k];
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (det == 0.0) {
      // Jitter may leave a sliver on a square face; it must lie in that face.
      bool on_face = false;
      for (int k = 0; k < 3; ++k) {
        bool same = true;
        for (int r = 1; r < 4; ++r) same = same && t.vertices.point(cell[r])[k] == a[k];
        on_face = on_face || same;
      }
      EXPECT_TRUE(on_face);
    }
    volume += std::abs(det) / 6.0;
  }
  EXPECT_NEAR(volume, 1.0, 1e-12);
}

TEST(Delaunay, RandomThreeDimensionalHullVolumeIsCovered) {
  // Points on a box's corners plus interior points: the cells tile the box.
  auto c = random_cloud(40, 3, 21);
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < 3; ++k) c.coords.push_back(((i >> k) & 1) ? 1.5 : -0.5);
  const auto t = delaunay(c);
  double volume = 0;
  for (const auto& cell : t.cells) {
    const auto a = t.vertices.point(cell[0]);
    double m[3][3];
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) m[r][k] = t.vertices.point(cell[r + 1])[k] - a[k];
    volume += std::abs(m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])) /
              6.0;
  }
  EXPECT_NEAR(volume, 8.0, 1e-9);
}

TEST(Delaunay, DuplicatesAreMerged) {
  const auto c = cloud(2, {0, 0, 1, 0, 0, 1, 1, 0, 0, 1e-14});
  const auto t = delaunay(c);
  EXPECT_EQ(t.vertices.size(), 3u);
  EXPECT_EQ(t.vertex_of_input, (std::vector<std::uint32_t>{0, 1, 2, 1, 0}));
  EXPECT_EQ(t.cells.size(), 1u);
}

TEST(Delaunay, CollinearIsDegenerate) {
  try {
    delaunay(cloud(2, {0, 0, 1, 1, 2, 2, 3, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateGeometry);
  }
  try {
    delaunay(cloud(3, {0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateGeometry);
  }
}
