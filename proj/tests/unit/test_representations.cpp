#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "synth.hpp"
#include "topovox/error.hpp"
#include "topovox/representations.hpp"

using namespace topovox;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected topovox::Error";
  return ErrorCode::kIo;
}

std::vector<double> gaussian_noise(std::size_t n, std::uint64_t seed, double sd = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

std::vector<double> uniform_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

// One period repeated, so x[i + period] == x[i] bit for bit.
std::vector<double> tiled_sine(std::size_t period, std::size_t n) {
  std::vector<double> one(period), x(n);
  for (std::size_t i = 0; i < period; ++i) one[i] = std::sin(2.0 * M_PI * static_cast<double>(i) / period);
  for (std::size_t i = 0; i < n; ++i) x[i] = one[i % period];
  return x;
}

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST(Window, SymmetricWithUnitCentre) {
  for (std::size_t len : {3u, 4u, 17u, 185u, 186u}) {
    const auto w = gaussian_window(len);
    for (std::size_t i = 0; i < len; ++i) EXPECT_EQ(w[i], w[len - 1 - i]) << len << " " << i;
  }
  EXPECT_EQ(gaussian_window(185)[92], std::pow(M_PI, -0.25));
  EXPECT_EQ(code_of([] { gaussian_window(2); }), ErrorCode::kInvalidParameter);
}

TEST(Window, MonotoneFromCentre) {
  const auto w = gaussian_window(186);
  for (std::size_t i = 93; i + 1 < w.size(); ++i) EXPECT_GT(w[i], w[i + 1]);
  for (std::size_t i = 1; i <= 92; ++i) EXPECT_GT(w[i], w[i - 1]);
}

TEST(Spectrogram, FramingArithmetic) {
  EXPECT_EQ(window_length(16000, 11.6), 186u);
  EXPECT_EQ(hop_length(186, 0.9), 19u);
  const auto s = spectrogram(std::vector<double>(16000, 0.0), 16000.0);
  EXPECT_EQ(s.n_frames, 833u);
  for (double p : s.power) ASSERT_EQ(p, 0.0);
  EXPECT_EQ(code_of([] { spectrogram(std::vector<double>(100, 0.1), 16000.0); }), ErrorCode::kTooShort);
}

TEST(Spectrogram, SinePeaksAtNearestBin) {
  const auto x = synth::sine(440.0, 1.0);
  const auto s = spectrogram(x, 16000.0);
  const double bin_hz = 16000.0 / static_cast<double>(s.fft_size);
  const auto expected = static_cast<std::size_t>(std::lround(440.0 / bin_hz));
  for (std::size_t f = 0; f < s.n_frames; ++f) {
    const auto fr = s.frame(f);
    const auto arg = static_cast<std::size_t>(std::max_element(fr.begin(), fr.end()) - fr.begin());
    ASSERT_EQ(arg, expected) << "frame " << f;
  }
}

TEST(Spectrogram, FramePowerMatchesDirectDft) {
  const auto x = gaussian_noise(4000, 3);
  const auto s = spectrogram(x, 16000.0);
  const auto w = gaussian_window(s.window_len);
  for (std::size_t f : std::vector<std::size_t>{0, 7, s.n_frames - 1}) {
    std::vector<double> frame(s.window_len);
    for (std::size_t i = 0; i < s.window_len; ++i) frame[i] = x[f * s.hop + i] * w[i];
    const auto ref = oracle::dft_power(frame, s.fft_size);
    for (std::size_t b = 0; b < s.n_bins; ++b) EXPECT_NEAR(s.at(f, b), ref[b], 1e-9 * (1.0 + ref[b]));
  }
}

TEST(Zeros, SingleStrictMinimum) {
  SpectrogramSurface s;
  s.n_frames = 5;
  s.n_bins = 6;
  s.power.assign(30, 1.0);
  s.power[2 * 6 + 3] = 0.01;
  for (std::size_t f = 0; f < 5; ++f) s.times.push_back(0.1 * f);
  for (std::size_t b = 0; b < 6; ++b) s.freqs.push_back(100.0 * b);
  const auto z = extract_zeros(s);
  ASSERT_EQ(z.size(), 1u);
  EXPECT_DOUBLE_EQ(z.point(0)[0], 0.5);
  EXPECT_DOUBLE_EQ(z.point(0)[1], 0.6);
  s.n_frames = 2;
  s.power.resize(12);
  EXPECT_EQ(code_of([&] { extract_zeros(s); }), ErrorCode::kTooShort);
}

TEST(Zeros, TwoToneInterferenceChain) {
  auto x = synth::sine(2000.0, 1.0, 16000.0, 0.5);
  const auto y = synth::sine(3000.0, 1.0, 16000.0, 0.5);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
  const auto s = spectrogram(x, 16000.0);
  const auto z = extract_zeros(s);
  const auto w = gaussian_window(s.window_len);
  const double f_span = s.freqs.back() - s.freqs.front();
  const double t_span = s.times.back() - s.times.front();

  std::size_t between = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double hz = z.point(i)[1] * f_span;
    if (hz <= 2000.0 || hz >= 3000.0) continue;
    ++between;
    const auto f = static_cast<std::size_t>(std::lround(z.point(i)[0] * t_span / (s.times[1] - s.times[0])));
    const auto b = static_cast<std::size_t>(std::lround(hz / s.freqs[1]));
    // Recompute the 3x3 neighbourhood from scratch and confirm a strict minimum.
    double centre = 0;
    std::vector<double> around;
    for (int df = -1; df <= 1; ++df) {
      std::vector<double> frame(s.window_len);
      for (std::size_t k = 0; k < s.window_len; ++k) frame[k] = x[(f + df) * s.hop + k] * w[k];
      const auto p = oracle::dft_power(frame, s.fft_size);
      for (int db = -1; db <= 1; ++db) {
        if (df == 0 && db == 0)
          centre = p[b];
        else
          around.push_back(p[b + db]);
      }
    }
    for (double a : around) EXPECT_LT(centre, a) << "frame " << f << " bin " << b;
  }
  // Nulls recur with the 1 kHz beat, several per ten frames.
  EXPECT_GT(between, s.n_frames / 10);
}

TEST(Zeros, NoiseDensityIsStable) {
  std::vector<double> counts;
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    counts.push_back(static_cast<double>(extract_zeros(spectrogram(gaussian_noise(16000, 100 + seed), 16000.0)).size()));
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / counts.size();
  EXPECT_GT(mean, 100.0);
  for (double c : counts) EXPECT_LT(std::abs(c - mean), 0.2 * mean);
}

TEST(Ami, IndependentNoiseNearZero) {
  EXPECT_LT(ami(uniform_noise(16000, 5), 1), 0.05);
  EXPECT_GE(ami(uniform_noise(16000, 6), 1), 0.0);
}

TEST(Ami, PeriodEqualsEntropyAndQuarterIsLess) {
  const std::size_t period = 64;
  const auto x = tiled_sine(period, 8000);
  const double full = ami(x, period);
  EXPECT_NEAR(full, binned_entropy(x, x.size() - period), 1e-12);
  const double quarter = ami(x, period / 4);
  EXPECT_GT(quarter, 0.0);
  EXPECT_LT(quarter, full);
  EXPECT_EQ(code_of([] { ami(std::vector<double>(100, 1.0), 1); }), ErrorCode::kDegenerateSignal);
}

TEST(Delay, NoiseAndSlowSine) {
  EXPECT_EQ(select_delay(uniform_noise(8000, 9)), 1u);
  EXPECT_GT(select_delay(tiled_sine(400, 8000)), 1u);
}

TEST(Cao, SineEmbedsInThePlane) {
  // 200 Hz at 16 kHz: period 80 samples, quarter-period delay.
  const auto x = synth::sine(200.0, 0.5);
  const auto r = cao_embedding(x, 20);
  EXPECT_EQ(r.dimension, 2u);
  EXPECT_TRUE(r.saturated);
}

TEST(Cao, NoiseNeedsMoreDimensions) {
  const auto x = gaussian_noise(4000, 11);
  const auto r = cao_embedding(x, 1);
  EXPECT_GT(r.dimension, 2u);
  // E1 grows gradually rather than jumping to 1 at low d.
  EXPECT_LT(r.e1[0], 0.9);
  EXPECT_LT(r.e1[1], r.e1[4]);
}

TEST(Cao, FallbackWhenNeverStabilizing) {
  CaoOptions opt;
  opt.max_dim = 2;
  const auto r = cao_embedding(gaussian_noise(4000, 12), 1, opt);
  EXPECT_EQ(r.dimension, 2u);
  EXPECT_FALSE(r.saturated);
  EXPECT_EQ(code_of([] { cao_dimension(std::vector<double>(8, 0.5), 1); }), ErrorCode::kTooShort);
}

TEST(Takens, SmallFixture) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const auto c = takens_embed(x, {1, 2});
  ASSERT_EQ(c.dim, 2u);
  EXPECT_EQ(c.coords, (std::vector<double>{1, 2, 2, 3, 3, 4, 4, 5}));
  EXPECT_EQ(code_of([&] { takens_embed(x, {3, 3}); }), ErrorCode::kTooShort);
}

TEST(Takens, PointCount) {
  const auto x = uniform_noise(1000, 1);
  for (std::size_t tau : {1u, 3u, 17u})
    for (std::size_t d : {1u, 2u, 5u}) EXPECT_EQ(takens_embed(x, {tau, d}).size(), 1000 - (d - 1) * tau);
}

TEST(Takens, QuarterPeriodSineIsACircle) {
  const std::size_t period = 64;
  std::vector<double> x(2000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * M_PI * static_cast<double>(i) / period);
  const auto c = takens_embed(x, {period / 4, 2});
  double worst = 0;
  for (std::size_t i = 0; i < c.size(); ++i) worst = std::max(worst, std::abs(std::hypot(c.point(i)[0], c.point(i)[1]) - 1.0));
  EXPECT_LT(worst, 1e-9);
}

TEST(Reduce, ThreeDimensionalIsIdentity) {
  PointCloud c;
  c.dim = 3;
  c.coords = uniform_noise(30, 2);
  EXPECT_EQ(reduce_to_3d(c).coords, c.coords);
}

TEST(Reduce, PlaneInFiveDimsKeepsDistances) {
  // Orthonormal pair spanning a plane, offset from the origin.
  const std::vector<double> u{0.6, 0.8, 0, 0, 0}, v{0, 0, 0, 0.6, -0.8}, off{1, -2, 3, 0.5, 0.25};
  PointCloud c;
  c.dim = 5;
  const auto ab = uniform_noise(80, 3);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t k = 0; k < 5; ++k) c.coords.push_back(off[k] + ab[2 * i] * u[k] + ab[2 * i + 1] * v[k]);
  const auto r = reduce_to_3d(c);
  ASSERT_EQ(r.dim, 3u);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = i + 1; j < 40; ++j) EXPECT_NEAR(dist(r.point(i), r.point(j)), dist(c.point(i), c.point(j)), 1e-9);
}

TEST(Reduce, IsotropicGaussianKeepsThreeFifths) {
  PointCloud c;
  c.dim = 5;
  c.coords = gaussian_noise(5 * 5000, 4, 1.0);
  const auto r = reduce_to_3d(c);
  auto total_var = [](const PointCloud& p) {
    double total = 0;
    for (std::size_t k = 0; k < p.dim; ++k) {
      double m = 0, s = 0;
      for (std::size_t i = 0; i < p.size(); ++i) m += p.point(i)[k];
      m /= p.size();
      for (std::size_t i = 0; i < p.size(); ++i) s += (p.point(i)[k] - m) * (p.point(i)[k] - m);
      total += s / p.size();
    }
    return total;
  };
  EXPECT_NEAR(total_var(r) / total_var(c), 0.6, 0.05);
  PointCloud tiny;
  tiny.dim = 4;
  tiny.coords.assign(12, 0.0);
  EXPECT_EQ(code_of([&] { reduce_to_3d(tiny); }), ErrorCode::kTooShort);
}

TEST(Takens, RepresentationOfSineIsPlanar) {
  const auto t = takens_representation(synth::sine(300.0, 0.5));
  EXPECT_EQ(t.params.dim, 2u);
  EXPECT_EQ(t.cloud.dim, 2u);
  EXPECT_LE(t.cloud.size(), kMaxTakensPoints);
}
