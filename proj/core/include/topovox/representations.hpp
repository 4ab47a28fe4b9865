#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "topovox/audio_io.hpp"

namespace topovox {

inline constexpr double kPowerFloor = 1e-12;

/// Power spectrogram |STFT|^2, stored row-major as [frame][bin].
struct SpectrogramSurface {
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;
  std::vector<double> power;
  std::vector<double> times;  // seconds, frame centre
  std::vector<double> freqs;  // Hz
  std::size_t window_len = 0;
  std::size_t hop = 0;
  std::size_t fft_size = 0;

  double at(std::size_t frame, std::size_t bin) const { return power[frame * n_bins + bin]; }
  std::span<const double> frame(std::size_t f) const { return {power.data() + f * n_bins, n_bins}; }
};

/// Finite point set; coordinates stored point-major.
struct PointCloud {
  std::size_t dim = 0;
  std::vector<double> coords;
  std::string scale_note;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
  void push_back(std::span<const double> p);
};

struct TakensParams {
  std::size_t tau = 1;
  std::size_t dim = 1;
};

struct SpectrogramParams {
  double window_ms = 11.6;
  double overlap = 0.9;
};

std::size_t window_length(double sample_rate, double window_ms);
std::size_t hop_length(std::size_t window_len, double overlap);

/// h(t) = pi^(-1/4) exp(-t^2/4) sampled at len points over [-3*sqrt(2), 3*sqrt(2)].
std::vector<double> gaussian_window(std::size_t len);

SpectrogramSurface spectrogram(std::span<const double> signal, double sample_rate,
                               const SpectrogramParams& params = {});
SpectrogramSurface spectrogram(const Recording& recording, const SpectrogramParams& params = {});

/// Strict 8-neighbour local minima of log(power + floor), border excluded.
/// Coordinates are (time, frequency) mapped onto [0,1] by the grid extent.
PointCloud extract_zeros(const SpectrogramSurface& surface);

/// Histogram mutual information (nats) between x_i and x_{i+tau}, with the
/// Miller-Madow bias correction; clamped at 0.
double ami(std::span<const double> signal, std::size_t tau);

/// Miller-Madow entropy of the first `n` samples under the AMI binning; this is
/// the value ami() returns when x_{i+tau} == x_i.
double binned_entropy(std::span<const double> signal, std::size_t n);

inline constexpr std::size_t kMaxDelay = 100;

/// Smallest tau in [1, tau_max] with ami(tau) < 1/e, else the argmin of ami.
std::size_t select_delay(std::span<const double> signal, std::size_t tau_max = kMaxDelay);

struct CaoOptions {
  double delta = 0.05;
  std::size_t max_dim = 10;
};

struct CaoResult {
  std::size_t dimension = 0;
  bool saturated = false;    // false when the fallback D = max_dim was used
  std::vector<double> e;     // E(d), d = 1..max_dim+1
  std::vector<double> e1;    // E1(d), d = 1..max_dim
};

CaoResult cao_embedding(std::span<const double> signal, std::size_t tau, const CaoOptions& options = {});
std::size_t cao_dimension(std::span<const double> signal, std::size_t tau, const CaoOptions& options = {});

PointCloud takens_embed(std::span<const double> signal, const TakensParams& params);

/// PCA onto the three leading principal axes (identity when dim == 3).
PointCloud reduce_to_3d(const PointCloud& cloud);

/// Keeps every ceil(n/max_points)-th point.
PointCloud stride_subsample(const PointCloud& cloud, std::size_t max_points);

inline constexpr std::size_t kMaxTakensPoints = 2000;

struct TakensCloud {
  PointCloud cloud;
  TakensParams params;
  bool cao_saturated = true;
};

/// select_delay + cao_dimension + embedding + stride subsampling + harmonization
/// to 3D. Clouds with D < 3, or whose PCA image is planar, stay 2-dimensional.
TakensCloud takens_representation(std::span<const double> signal);

void write_point_cloud_csv(std::ostream& out, const PointCloud& cloud);
void write_surface_csv(std::ostream& out, const SpectrogramSurface& surface);

}  // namespace topovox
