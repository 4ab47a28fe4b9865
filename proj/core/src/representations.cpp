#include "topovox/representations.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>

#include "kdtree.hpp"
#include "topovox/csv.hpp"
#include "topovox/error.hpp"

namespace topovox {
namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// FFTW planning is not thread-safe; execution on fresh aligned buffers is.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  const fftw_complex* output() const { return out_; }
  void run() { fftw_execute(plan_); }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

struct Binning {
  double lo = 0.0;
  double scale = 0.0;
  std::size_t bins = 1;

  std::size_t operator()(double v) const {
    const auto b = static_cast<std::size_t>((v - lo) * scale);
    return std::min(b, bins - 1);
  }
};

Binning make_binning(std::span<const double> signal, std::size_t n_pairs) {
  const auto [mn, mx] = std::minmax_element(signal.begin(), signal.end());
  if (!(*mx > *mn)) fail(ErrorCode::kDegenerateSignal, "constant signal has no mutual information");
  Binning b;
  b.bins = std::min<std::size_t>(
      64, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_pairs) / 5.0))));
  b.bins = std::max<std::size_t>(b.bins, 1);
  b.lo = *mn;
  b.scale = static_cast<double>(b.bins) / (*mx - *mn);
  return b;
}

double plugin_entropy(const std::vector<std::size_t>& counts, double n, std::size_t& occupied) {
  double h = 0.0;
  occupied = 0;
  for (auto c : counts) {
    if (c == 0) continue;
    ++occupied;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

struct Pca {
  Eigen::VectorXd mean;
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // columns, matching eigenvalues
};

Pca principal_axes(const PointCloud& cloud) {
  const auto n = static_cast<Eigen::Index>(cloud.size());
  const auto d = static_cast<Eigen::Index>(cloud.dim);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(cloud.coords.data(),
                                                                                              n, d);
  Pca pca;
  pca.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - pca.mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  pca.eigenvalues = solver.eigenvalues().reverse();
  pca.eigenvectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index c = 0; c < pca.eigenvectors.cols(); ++c) {
    Eigen::Index arg = 0;
    pca.eigenvectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (pca.eigenvectors(arg, c) < 0) pca.eigenvectors.col(c) *= -1.0;
  }
  return pca;
}

PointCloud project(const PointCloud& cloud, const Pca& pca, std::size_t k) {
  PointCloud out;
  out.dim = k;
  out.coords.resize(cloud.size() * k);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (std::size_t c = 0; c < k; ++c) {
      double acc = 0.0;
      for (std::size_t a = 0; a < cloud.dim; ++a) {
        acc += (p[a] - pca.mean(static_cast<Eigen::Index>(a))) *
               pca.eigenvectors(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
      }
      out.coords[i * k + c] = acc;
    }
  }
  return out;
}

double explained(const Pca& pca, std::size_t k) {
  const double total = pca.eigenvalues.sum();
  return total > 0 ? pca.eigenvalues.head(static_cast<Eigen::Index>(k)).sum() / total : 1.0;
}

}  // namespace

void PointCloud::push_back(std::span<const double> p) {
  if (dim == 0) dim = p.size();
  if (p.size() != dim) fail(ErrorCode::kInvalidParameter, "point dimension mismatch");
  coords.insert(coords.end(), p.begin(), p.end());
}

std::size_t window_length(double sample_rate, double window_ms) {
  return static_cast<std::size_t>(std::llround(window_ms / 1000.0 * sample_rate));
}

std::size_t hop_length(std::size_t window_len, double overlap) {
  const auto hop = std::llround(static_cast<double>(window_len) * (1.0 - overlap));
  return static_cast<std::size_t>(std::max<long long>(1, hop));
}

std::vector<double> gaussian_window(std::size_t len) {
  if (len < 3) fail(ErrorCode::kInvalidParameter, "window length must be at least 3");
  const double half_span = 3.0 * std::sqrt(2.0);
  const double amplitude = std::pow(M_PI, -0.25);
  std::vector<double> w(len);
  const double step = 2.0 * half_span / static_cast<double>(len - 1);
  for (std::size_t i = 0; i < len; ++i) {
    // index from both ends so the result is exactly symmetric
    const double k = std::min(i, len - 1 - i);
    const double t = -half_span + step * k;
    w[i] = amplitude * std::exp(-t * t / 4.0);
  }
  if (len % 2 == 1) w[len / 2] = amplitude;
  return w;
}

SpectrogramSurface spectrogram(std::span<const double> signal, double sample_rate, const SpectrogramParams& params) {
  if (!(params.overlap >= 0.0 && params.overlap < 1.0) || !(params.window_ms > 0.0)) {
    fail(ErrorCode::kInvalidParameter, "window_ms must be > 0 and overlap in [0,1)");
  }
  SpectrogramSurface s;
  s.window_len = window_length(sample_rate, params.window_ms);
  s.hop = hop_length(s.window_len, params.overlap);
  s.fft_size = next_pow2(s.window_len);
  if (signal.size() < s.window_len) {
    fail(ErrorCode::kTooShort, "signal of " + std::to_string(signal.size()) + " samples is shorter than the " +
                                    std::to_string(s.window_len) + "-sample window");
  }
  const auto window = gaussian_window(s.window_len);
  s.n_frames = (signal.size() - s.window_len) / s.hop + 1;
  s.n_bins = s.fft_size / 2 + 1;
  s.power.resize(s.n_frames * s.n_bins);
  s.times.resize(s.n_frames);
  s.freqs.resize(s.n_bins);
  for (std::size_t b = 0; b < s.n_bins; ++b) s.freqs[b] = static_cast<double>(b) * sample_rate / s.fft_size;

  RealFft fft(s.fft_size);
  for (std::size_t f = 0; f < s.n_frames; ++f) {
    const std::size_t start = f * s.hop;
    double* in = fft.input();
    for (std::size_t i = 0; i < s.fft_size; ++i) in[i] = i < s.window_len ? signal[start + i] * window[i] : 0.0;
    fft.run();
    const fftw_complex* out = fft.output();
    for (std::size_t b = 0; b < s.n_bins; ++b) s.power[f * s.n_bins + b] = out[b][0] * out[b][0] + out[b][1] * out[b][1];
    s.times[f] = (static_cast<double>(start) + 0.5 * static_cast<double>(s.window_len - 1)) / sample_rate;
  }
  return s;
}

SpectrogramSurface spectrogram(const Recording& recording, const SpectrogramParams& params) {
  return spectrogram(recording.samples(), recording.sample_rate, params);
}

PointCloud extract_zeros(const SpectrogramSurface& surface) {
  const std::size_t nf = surface.n_frames;
  const std::size_t nb = surface.n_bins;
  if (nf < 3 || nb < 3) fail(ErrorCode::kTooShort, "zero extraction needs at least a 3x3 grid");
  std::vector<double> level(surface.power.size());
  for (std::size_t i = 0; i < level.size(); ++i) level[i] = std::log(surface.power[i] + kPowerFloor);

  const double t0 = surface.times.front();
  const double t_span = surface.times.back() - t0;
  const double f0 = surface.freqs.front();
  const double f_span = surface.freqs.back() - f0;

  PointCloud zeros;
  zeros.dim = 2;
  zeros.scale_note = "time,frequency normalized to [0,1] by grid extent";
  for (std::size_t f = 1; f + 1 < nf; ++f) {
    for (std::size_t b = 1; b + 1 < nb; ++b) {
      const double v = level[f * nb + b];
      bool minimum = true;
      for (int df = -1; df <= 1 && minimum; ++df) {
        for (int db = -1; db <= 1; ++db) {
          if (df == 0 && db == 0) continue;
          if (!(v < level[(f + df) * nb + (b + db)])) {
            minimum = false;
            break;
          }
        }
      }
      if (!minimum) continue;
      const double t = t_span > 0 ? (surface.times[f] - t0) / t_span : 0.0;
      const double w = f_span > 0 ? (surface.freqs[b] - f0) / f_span : 0.0;
      zeros.coords.push_back(t);
      zeros.coords.push_back(w);
    }
  }
  return zeros;
}

double ami(std::span<const double> signal, std::size_t tau) {
  if (tau < 1 || tau >= signal.size()) fail(ErrorCode::kInvalidParameter, "tau must be in [1, len)");
  const std::size_t n = signal.size() - tau;
  const Binning bin = make_binning(signal, n);
  const std::size_t B = bin.bins;
  std::vector<std::size_t> joint(B * B, 0), px(B, 0), py(B, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = bin(signal[i]);
    const auto b = bin(signal[i + tau]);
    ++joint[a * B + b];
    ++px[a];
    ++py[b];
  }
  const double dn = static_cast<double>(n);
  std::size_t mx = 0, my = 0, mxy = 0;
  const double hx = plugin_entropy(px, dn, mx);
  const double hy = plugin_entropy(py, dn, my);
  const double hxy = plugin_entropy(joint, dn, mxy);
  const double correction = (static_cast<double>(mx) - 1.0 + static_cast<double>(my) - 1.0 -
                             (static_cast<double>(mxy) - 1.0)) / (2.0 * dn);
  return std::max(0.0, hx + hy - hxy + correction);
}

double binned_entropy(std::span<const double> signal, std::size_t n) {
  if (n == 0 || n > signal.size()) fail(ErrorCode::kInvalidParameter, "bad sample count");
  const Binning bin = make_binning(signal, n);
  std::vector<std::size_t> counts(bin.bins, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[bin(signal[i])];
  std::size_t m = 0;
  const double h = plugin_entropy(counts, static_cast<double>(n), m);
  return h + (static_cast<double>(m) - 1.0) / (2.0 * static_cast<double>(n));
}

std::size_t select_delay(std::span<const double> signal, std::size_t tau_max) {
  if (signal.size() < 2) fail(ErrorCode::kTooShort, "delay selection needs at least 2 samples");
  const std::size_t limit = std::min(tau_max, signal.size() - 1);
  const double threshold = std::exp(-1.0);
  std::size_t best_tau = 1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t tau = 1; tau <= limit; ++tau) {
    const double value = ami(signal, tau);
    if (value < threshold) return tau;
    if (value < best) {
      best = value;
      best_tau = tau;
    }
  }
  return best_tau;
}

CaoResult cao_embedding(std::span<const double> signal, std::size_t tau, const CaoOptions& options) {
  if (tau < 1) fail(ErrorCode::kInvalidParameter, "tau must be >= 1");
  if (options.max_dim < 1) fail(ErrorCode::kInvalidParameter, "max_dim must be >= 1");
  const std::size_t top = options.max_dim + 1;  // E(d) needed for d = 1..top
  const std::size_t span_needed = top * tau;
  if (signal.size() <= span_needed + 10) {
    fail(ErrorCode::kTooShort, "signal too short for a " + std::to_string(top + 1) + "-dimensional embedding");
  }
  const auto [mn, mx] = std::minmax_element(signal.begin(), signal.end());
  if (!(*mx > *mn)) fail(ErrorCode::kDegenerateSignal, "constant signal");
  const double duplicate_eps = 1e-9 * (*mx - *mn);

  CaoResult result;
  result.e.resize(top);
  std::vector<double> coords;
  for (std::size_t d = 1; d <= top; ++d) {
    const std::size_t count = signal.size() - d * tau;  // points whose (d+1)-th coordinate exists
    coords.resize(count * d);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t a = 0; a < d; ++a) coords[i * d + a] = signal[i + a * tau];
    }
    detail::ChebyshevKdTree tree(coords, d, count);
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const auto hit = tree.nearest(std::span<const double>(coords.data() + i * d, d), duplicate_eps);
      if (!std::isfinite(hit.distance)) continue;
      const double extra = std::abs(signal[i + d * tau] - signal[hit.index + d * tau]);
      sum += std::max(hit.distance, extra) / hit.distance;
      ++used;
    }
    if (used == 0) fail(ErrorCode::kDegenerateSignal, "no distinct neighbours for Cao's method");
    result.e[d - 1] = sum / static_cast<double>(used);
  }
  result.e1.resize(options.max_dim);
  for (std::size_t d = 1; d <= options.max_dim; ++d) result.e1[d - 1] = result.e[d] / result.e[d - 1];

  result.dimension = options.max_dim;
  result.saturated = false;
  for (std::size_t d = 1; d <= options.max_dim; ++d) {
    if (result.e1[d - 1] < 1.0 - options.delta) continue;
    bool stable = true;
    for (std::size_t k = d; k < options.max_dim; ++k) {
      if (std::abs(result.e1[k] - result.e1[k - 1]) >= options.delta) {
        stable = false;
        break;
      }
    }
    if (stable) {
      result.dimension = d;
      result.saturated = true;
      break;
    }
  }
  return result;
}

std::size_t cao_dimension(std::span<const double> signal, std::size_t tau, const CaoOptions& options) {
  return cao_embedding(signal, tau, options).dimension;
}

PointCloud takens_embed(std::span<const double> signal, const TakensParams& params) {
  if (params.tau < 1 || params.dim < 1) fail(ErrorCode::kInvalidParameter, "tau and dim must be >= 1");
  const std::size_t reach = (params.dim - 1) * params.tau;
  if (signal.size() < reach + 1) fail(ErrorCode::kTooShort, "signal shorter than the embedding window");
  const std::size_t m = signal.size() - reach;
  PointCloud cloud;
  cloud.dim = params.dim;
  cloud.coords.resize(m * params.dim);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < params.dim; ++a) cloud.coords[i * params.dim + a] = signal[i + a * params.tau];
  }
  cloud.scale_note = "takens tau=" + std::to_string(params.tau) + " D=" + std::to_string(params.dim);
  return cloud;
}

PointCloud reduce_to_3d(const PointCloud& cloud) {
  if (cloud.dim < 3) fail(ErrorCode::kInvalidParameter, "reduce_to_3d needs at least 3 dimensions");
  if (cloud.size() < 4) fail(ErrorCode::kTooShort, "reduce_to_3d needs at least 4 points");
  if (cloud.dim == 3) return cloud;
  const Pca pca = principal_axes(cloud);
  PointCloud out = project(cloud, pca, 3);
  out.scale_note = cloud.scale_note + "; pca3 (deviation: umap replaced by pca), explained=" +
                   csv::format_double(explained(pca, 3));
  return out;
}

PointCloud stride_subsample(const PointCloud& cloud, std::size_t max_points) {
  if (max_points == 0 || cloud.size() <= max_points) return cloud;
  const std::size_t stride = (cloud.size() + max_points - 1) / max_points;
  PointCloud out;
  out.dim = cloud.dim;
  out.scale_note = cloud.scale_note + "; stride=" + std::to_string(stride);
  for (std::size_t i = 0; i < cloud.size(); i += stride) out.push_back(cloud.point(i));
  return out;
}

TakensCloud takens_representation(std::span<const double> signal) {
  TakensCloud out;
  out.params.tau = select_delay(signal);
  const auto cao = cao_embedding(signal, out.params.tau);
  out.params.dim = cao.dimension;
  out.cao_saturated = cao.saturated;

  const std::size_t embed_dim = std::max<std::size_t>(cao.dimension, 2);
  PointCloud cloud = takens_embed(signal, {out.params.tau, embed_dim});
  if (embed_dim >= 3 && cloud.size() >= 4) {
    const Pca pca = principal_axes(cloud);
    const bool planar = pca.eigenvalues(2) <= 1e-10 * pca.eigenvalues(0);
    const std::size_t k = planar ? 2 : 3;
    if (embed_dim == 3 && !planar) {
      cloud.scale_note += "; native 3d";
    } else {
      const std::string note = cloud.scale_note;
      cloud = project(cloud, pca, k);
      cloud.scale_note = note + (planar ? "; planar cloud kept in 2d" : "; pca3 (deviation: umap replaced by pca)");
    }
  }
  out.cloud = stride_subsample(cloud, kMaxTakensPoints);
  return out;
}

void write_point_cloud_csv(std::ostream& out, const PointCloud& cloud) {
  out << "# dim=" << cloud.dim << " points=" << cloud.size() << " note=" << cloud.scale_note << '\n';
  csv::Row header;
  for (std::size_t a = 0; a < cloud.dim; ++a) header.push_back("x" + std::to_string(a));
  csv::write_row(out, header);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    csv::Row row;
    for (double v : cloud.point(i)) row.push_back(csv::format_double(v));
    csv::write_row(out, row);
  }
}

void write_surface_csv(std::ostream& out, const SpectrogramSurface& surface) {
  out << "# frames=" << surface.n_frames << " bins=" << surface.n_bins << " window_len=" << surface.window_len
      << " hop=" << surface.hop << " fft_size=" << surface.fft_size << '\n';
  csv::Row header{"time"};
  for (double f : surface.freqs) header.push_back(csv::format_double(f));
  csv::write_row(out, header);
  for (std::size_t f = 0; f < surface.n_frames; ++f) {
    csv::Row row{csv::format_double(surface.times[f])};
    for (double v : surface.frame(f)) row.push_back(csv::format_double(v));
    csv::write_row(out, row);
  }
}

}  // namespace topovox
