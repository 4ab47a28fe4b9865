#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "oracles.hpp"
#include "topovox/error.hpp"
#include "topovox/homology.hpp"

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

std::vector<PersistencePair> sorted_dim(const PersistenceDiagram& d, int p) {
  auto v = d.in_dim(p);
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return std::tie(a.birth, a.death) < std::tie(b.birth, b.death);
  });
  return v;
}

std::vector<double> scales(const FilteredSimplicialComplex& k) {
  std::vector<double> v;
  for (const auto& s : k.simplices) v.push_back(s.value);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

TEST(Alpha, EquilateralTriangle) {
  const auto k = alpha_filtration(cloud(2, {0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2}));
  ASSERT_EQ(k.simplices.size(), 7u);
  for (const auto& s : k.simplices) {
    const double want = s.dim == 0 ? 0.0 : s.dim == 1 ? 0.5 : 1.0 / std::sqrt(3.0);
    EXPECT_NEAR(s.value, want, 1e-12) << int(s.dim);
  }
  const auto d = compute_persistence(k);
  const auto h0 = sorted_dim(d, 0);
  ASSERT_EQ(h0.size(), 3u);
  EXPECT_NEAR(h0[0].death, 0.5, 1e-12);
  EXPECT_NEAR(h0[1].death, 0.5, 1e-12);
  EXPECT_TRUE(h0[2].essential());
  const auto h1 = sorted_dim(d, 1);
  ASSERT_EQ(h1.size(), 1u);
  EXPECT_NEAR(h1[0].birth, 0.5, 1e-9);
  EXPECT_NEAR(h1[0].death, 0.5773503, 1e-7);
}

TEST(Alpha, UnitSquare) {
  const auto d = compute_persistence(alpha_filtration(cloud(2, {0, 0, 1, 0, 1, 1, 0, 1})));
  const auto h1 = sorted_dim(d, 1);
  ASSERT_EQ(h1.size(), 1u);
  EXPECT_NEAR(h1[0].birth, 0.5, 1e-9);
  EXPECT_NEAR(h1[0].death, std::sqrt(2.0) / 2, 1e-9);
}

TEST(Alpha, SinglePoint) {
  const auto k = alpha_filtration(cloud(2, {0.3, 0.7}));
  ASSERT_EQ(k.simplices.size(), 1u);
  EXPECT_EQ(k.simplices[0].value, 0.0);
  const auto d = compute_persistence(k);
  ASSERT_EQ(d.points.size(), 1u);
  EXPECT_TRUE(d.points[0].essential());
}

TEST(Alpha, ObtuseEdgeInheritsCircumradius) {
  const auto c = cloud(2, {0, 0, 4, 0, 2, 0.5});
  const auto k = alpha_filtration(c);
  double tri = 0, longest = 0;
  for (const auto& s : k.simplices) {
    if (s.dim == 2) tri = s.value;
    if (s.dim == 1 && s.vertices[0] == 0 && s.vertices[1] == 1) longest = s.value;
  }
  EXPECT_GT(tri, 2.0);
  EXPECT_EQ(longest, tri);
  // No H1 class: the triangle enters with its last edge.
  EXPECT_TRUE(compute_persistence(k).in_dim(1).empty() ||
              compute_persistence(k).in_dim(1)[0].lifetime() == 0.0);
}

TEST(Alpha, MatchesBruteForceIn2D) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = random_cloud(15, 2, seed);
    const auto mine = alpha_filtration(c);
    const auto ref = oracle::alpha_2d_bruteforce(c);
    ASSERT_EQ(mine.simplices.size(), ref.simplices.size()) << seed;
    auto key = [](const Simplex& s) { return std::make_pair(s.dim, s.vertices); };
    auto a = mine.simplices, b = ref.simplices;
    std::sort(a.begin(), a.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
    std::sort(b.begin(), b.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ(key(a[i]), key(b[i])) << seed;
      // Radii of near-collinear hull triangles are ill-conditioned: compare relatively.
      EXPECT_NEAR(a[i].value, b[i].value, 1e-9 * std::max(1.0, std::abs(b[i].value))) << seed;
    }
  }
}

TEST(Alpha, H0DeathsAreHalfMstEdges) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (std::size_t dim : {2u, 3u}) {
      const auto c = random_cloud(40, dim, seed);
      const auto d = compute_persistence(alpha_filtration(c));
      const auto h0 = d.in_dim(0);
      ASSERT_EQ(h0.size(), 40u);
      std::vector<double> deaths;
      std::size_t essential = 0;
      for (const auto& p : h0) {
        if (p.essential())
          ++essential;
        else
          deaths.push_back(p.death);
      }
      EXPECT_EQ(essential, 1u);
      std::sort(deaths.begin(), deaths.end());
      const auto ref = oracle::half_mst_lengths(c);
      ASSERT_EQ(deaths.size(), ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(deaths[i], ref[i], 1e-12);
    }
  }
}

TEST(Persistence, BettiMatchesRankOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = random_cloud(12 + seed % 8, seed % 2 ? 3 : 2, 500 + seed);
    const auto k = alpha_filtration(c);
    const auto d = compute_persistence(k);
    const auto vals = scales(k);
    for (std::size_t i = 0; i < vals.size(); i += std::max<std::size_t>(1, vals.size() / 7)) {
      const auto ref = oracle::betti_bruteforce(k, vals[i]);
      for (int p = 0; p < static_cast<int>(ref.size()); ++p) EXPECT_EQ(d.betti(p, vals[i]), ref[p]) << seed << " " << p;
    }
  }
}

TEST(Persistence, SmallComplexesByRank) {
  const std::vector<oracle::Cell> boundary{{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 2}};
  EXPECT_EQ(oracle::simplicial_betti(boundary, 2), (std::vector<std::size_t>{1, 1, 0}));
  auto filled = boundary;
  filled.push_back({0, 1, 2});
  EXPECT_EQ(oracle::simplicial_betti(filled, 2), (std::vector<std::size_t>{1, 0, 0}));
  EXPECT_EQ(oracle::simplicial_betti({{0}, {1}, {2}, {3}, {0, 1}, {2, 3}}, 1), (std::vector<std::size_t>{2, 0}));

  FilteredSimplicialComplex k;
  k.dim = 2;
  k.add({0}, 0);
  k.add({1}, 0);
  k.add({2}, 0);
  k.add({0, 1}, 1);
  k.add({1, 2}, 1);
  k.add({0, 2}, 2);
  k.add({0, 1, 2}, 3);
  k.sort();
  const auto d = compute_persistence(k);
  EXPECT_EQ(d.betti(1, 2.5), 1u);
  EXPECT_EQ(d.betti(1, 3.0), 0u);
  EXPECT_EQ(d.betti(0, 1.0), 1u);
}

TEST(Persistence, NonMonotoneFiltrationRejected) {
  FilteredSimplicialComplex k;
  k.dim = 1;
  k.add({0}, 1.0);
  k.add({1}, 0.0);
  k.add({0, 1}, 0.5);
  k.sort();
  try {
    compute_persistence(k);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidFiltration);
  }
}

TEST(Persistence, Deterministic) {
  const auto c = random_cloud(60, 3, 77);
  const auto a = compute_persistence(alpha_filtration(c));
  const auto b = compute_persistence(alpha_filtration(c));
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(std::memcmp(&a.points[i].birth, &b.points[i].birth, sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&a.points[i].death, &b.points[i].death, sizeof(double)), 0);
    EXPECT_EQ(a.points[i].dim, b.points[i].dim);
  }
}

TEST(Cubical, ConstantGrid) {
  const auto k = cubical_filtration(std::vector<double>(12, 2.5), 3, 4);
  const auto d = compute_persistence(k);
  ASSERT_EQ(d.in_dim(0).size(), 1u);
  EXPECT_EQ(d.in_dim(0)[0].birth, 2.5);
  EXPECT_TRUE(d.in_dim(0)[0].essential());
  for (const auto& p : d.points) EXPECT_TRUE(p.essential() || p.lifetime() == 0.0);
}

TEST(Cubical, RampHasOneClass) {
  const auto d = compute_persistence(cubical_filtration({0.5, 1, 2, 3, 4, 5}, 1, 6));
  const auto h0 = sorted_dim(d, 0);
  std::size_t alive = 0;
  for (const auto& p : h0)
    if (p.lifetime() > 0) ++alive;
  EXPECT_EQ(alive, 1u);
  EXPECT_EQ(h0.front().birth, 0.5);
  EXPECT_TRUE(h0.front().essential());
}

TEST(Cubical, TwoBasins) {
  const auto d = compute_persistence(cubical_filtration({0, 2, 1}, 1, 3));
  const auto h0 = sorted_dim(d, 0);
  ASSERT_EQ(h0.size(), 2u);
  EXPECT_EQ(h0[0].birth, 0.0);
  EXPECT_TRUE(h0[0].essential());
  EXPECT_EQ(h0[1].birth, 1.0);
  EXPECT_EQ(h0[1].death, 2.0);
}

TEST(Cubical, RingHasOneLoop) {
  // 3x3 grid, low border around a high centre.
  const auto d = compute_persistence(cubical_filtration({0, 0, 0, 0, 5, 0, 0, 0, 0}, 3, 3));
  const auto h1 = d.in_dim(1);
  ASSERT_EQ(h1.size(), 1u);
  EXPECT_EQ(h1[0].birth, 0.0);
  EXPECT_EQ(h1[0].death, 5.0);
}

TEST(Cubical, BettiMatchesBruteForce) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t rows = 4 + trial % 5, cols = 5 + trial % 3;
    std::vector<double> g(rows * cols);
    for (auto& v : g) v = std::round(u(rng) * 8) / 8;  // ties on purpose
    const auto d = compute_persistence(cubical_filtration(g, rows, cols));
    for (double r : {0.0, 0.25, 0.5, 0.625, 1.0}) {
      const auto ref = oracle::cubical_betti_bruteforce(g, rows, cols, r);
      for (int p = 0; p < 2; ++p) EXPECT_EQ(d.betti(p, r), ref[p]) << trial << " r=" << r << " p=" << p;
    }
  }
}

TEST(Cubical, TooSmall) {
  try {
    cubical_filtration({1.0}, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooShort);
  }
}

TEST(Cubical, SpectrogramIsNegativeLogPower) {
  SpectrogramSurface s;
  s.n_frames = 2;
  s.n_bins = 3;
  s.power = {1, 0, 2, 3, 4, 5};
  const auto k = cubical_sublevel_filtration(s);
  ASSERT_EQ(k.rows, 2u);
  ASSERT_EQ(k.cols, 3u);
  EXPECT_DOUBLE_EQ(k.at(0, 0), -std::log(1 + kPowerFloor));
  EXPECT_DOUBLE_EQ(k.at(0, 1), -std::log(kPowerFloor));
}
