#include "topovox/mfcc.hpp"

#include <cmath>

#include "topovox/error.hpp"

namespace topovox {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank mel_filterbank(std::size_t n_filters, double f_min, double f_max, std::size_t fft_size,
                             double sample_rate) {
  if (n_filters == 0 || fft_size < 2 || !(sample_rate > 0.0)) {
    fail(ErrorCode::kInvalidParameter, "invalid filterbank dimensions");
  }
  if (!(f_min >= 0.0) || !(f_max > f_min) || f_max > sample_rate / 2.0 + 1e-9) {
    fail(ErrorCode::kInvalidParameter, "filterbank band must satisfy 0 <= f_min < f_max <= Nyquist");
  }
  MelFilterbank bank;
  bank.n_filters = n_filters;
  bank.n_bins = fft_size / 2 + 1;
  bank.weights.assign(n_filters * bank.n_bins, 0.0);
  const double m_lo = hz_to_mel(f_min), m_hi = hz_to_mel(f_max);
  std::vector<double> edges(n_filters + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(m_lo + (m_hi - m_lo) * static_cast<double>(i) / static_cast<double>(n_filters + 1));
  }
  for (std::size_t m = 0; m < n_filters; ++m) {
    const double left = edges[m], centre = edges[m + 1], right = edges[m + 2];
    bank.center_hz.push_back(centre);
    for (std::size_t b = 0; b < bank.n_bins; ++b) {
      const double f = static_cast<double>(b) * sample_rate / static_cast<double>(fft_size);
      double w = 0.0;
      if (f > left && f <= centre) {
        w = (f - left) / (centre - left);
      } else if (f > centre && f < right) {
        w = (right - f) / (right - centre);
      }
      bank.weights[m * bank.n_bins + b] = w;
    }
  }
  return bank;
}

std::vector<double> dct2_orthonormal(std::span<const double> x, std::size_t keep) {
  const std::size_t n = x.size();
  if (n == 0) fail(ErrorCode::kEmptyInput, "DCT of empty vector");
  std::vector<double> out(std::min(keep, n));
  for (std::size_t k = 0; k < out.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += x[i] * std::cos(M_PI * static_cast<double>(k) * (2.0 * static_cast<double>(i) + 1.0) /
                             (2.0 * static_cast<double>(n)));
    }
    const double scale = k == 0 ? std::sqrt(1.0 / static_cast<double>(n)) : std::sqrt(2.0 / static_cast<double>(n));
    out[k] = scale * acc;
  }
  return out;
}

std::vector<double> frame_mfcc(std::span<const double> power_frame, const MelFilterbank& bank,
                               const MfccParams& params) {
  if (power_frame.size() != bank.n_bins) fail(ErrorCode::kInvalidParameter, "frame length does not match filterbank");
  std::vector<double> log_energy(bank.n_filters);
  for (std::size_t m = 0; m < bank.n_filters; ++m) {
    const auto w = bank.filter(m);
    double e = 0.0;
    for (std::size_t b = 0; b < bank.n_bins; ++b) e += w[b] * power_frame[b];
    log_energy[m] = std::log(e + params.floor);
  }
  return dct2_orthonormal(log_energy, params.n_coeffs);
}

std::vector<double> aggregate_mfcc(const SpectrogramSurface& surface, double sample_rate, const MfccParams& params) {
  if (surface.n_frames == 0) fail(ErrorCode::kTooShort, "no frames for MFCC");
  const auto bank = mel_filterbank(params.n_filters, params.f_min, params.f_max, surface.fft_size, sample_rate);
  std::vector<double> mean(params.n_coeffs, 0.0);
  for (std::size_t f = 0; f < surface.n_frames; ++f) {
    const auto c = frame_mfcc(surface.frame(f), bank, params);
    for (std::size_t k = 0; k < c.size(); ++k) mean[k] += c[k];
  }
  for (double& v : mean) v /= static_cast<double>(surface.n_frames);
  return mean;
}

std::vector<double> aggregate_mfcc(const Recording& recording, const SpectrogramParams& spectrogram_params,
                                   const MfccParams& params) {
  const auto surface = spectrogram(recording, spectrogram_params);
  return aggregate_mfcc(surface, static_cast<double>(recording.sample_rate), params);
}

}  // namespace topovox
