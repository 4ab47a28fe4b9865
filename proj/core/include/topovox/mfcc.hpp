#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "topovox/representations.hpp"

namespace topovox {

struct MfccParams {
  std::size_t n_filters = 26;
  double f_min = 0.0;
  double f_max = 8000.0;
  std::size_t n_coeffs = 13;
  double floor = 1e-12;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular filters equally spaced on the mel scale, row-major
/// [filter][bin] over the fft_size/2+1 one-sided bins.
struct MelFilterbank {
  std::size_t n_filters = 0;
  std::size_t n_bins = 0;
  std::vector<double> weights;
  std::vector<double> center_hz;

  std::span<const double> filter(std::size_t i) const { return {weights.data() + i * n_bins, n_bins}; }
};

MelFilterbank mel_filterbank(std::size_t n_filters, double f_min, double f_max, std::size_t fft_size,
                             double sample_rate);

/// Orthonormal DCT-II, first `keep` coefficients.
std::vector<double> dct2_orthonormal(std::span<const double> x, std::size_t keep);

std::vector<double> frame_mfcc(std::span<const double> power_frame, const MelFilterbank& bank,
                               const MfccParams& params = {});

/// Mean of frame_mfcc over all frames.
std::vector<double> aggregate_mfcc(const SpectrogramSurface& surface, double sample_rate,
                                   const MfccParams& params = {});
std::vector<double> aggregate_mfcc(const Recording& recording, const SpectrogramParams& spectrogram = {},
                                   const MfccParams& params = {});

}  // namespace topovox
