#include "topovox/vectorize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "topovox/error.hpp"

namespace topovox {
namespace {

std::string dim_tag(int p) { return "H" + std::to_string(p); }

std::optional<double> top(const std::vector<double>& L, std::size_t i) {
  if (i == 0 || i > L.size()) return std::nullopt;
  return L[i - 1];
}

double sum_of(const std::vector<double>& L) { return std::accumulate(L.begin(), L.end(), 0.0); }

std::size_t count_above(const std::vector<double>& L, double alpha) {
  return static_cast<std::size_t>(std::count_if(L.begin(), L.end(), [alpha](double l) { return l > alpha; }));
}

std::optional<double> mean_of(const std::vector<double>& L) {
  if (L.empty()) return std::nullopt;
  return sum_of(L) / static_cast<double>(L.size());
}

// Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 4> kGlNodes = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                            0.8611363115940526};
constexpr std::array<double, 4> kGlWeights = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                              0.3478548451374538};

}  // namespace

void FeatureVector::add(const std::string& name, std::optional<double> value) {
  const bool undefined = !value.has_value() || !std::isfinite(*value);
  names.push_back(name);
  values.push_back(undefined ? 0.0 : *value);
  names.push_back(name + ".missing");
  values.push_back(undefined ? 1.0 : 0.0);
}

void FeatureVector::append(const FeatureVector& other) {
  names.insert(names.end(), other.names.begin(), other.names.end());
  values.insert(values.end(), other.values.begin(), other.values.end());
}

std::optional<double> FeatureVector::get(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return values[static_cast<std::size_t>(it - names.begin())];
}

bool FeatureVector::missing(const std::string& name) const { return get(name + ".missing").value_or(0.0) != 0.0; }

std::vector<double> lifetimes(const PersistenceDiagram& diagram, int p) {
  std::vector<double> L;
  for (const auto& q : diagram.capped(p)) L.push_back(std::max(0.0, q.death - q.birth));
  std::sort(L.begin(), L.end(), std::greater<>());
  return L;
}

std::optional<double> persistent_entropy_checked(const std::vector<double>& L) {
  const double total = sum_of(L);
  if (L.empty() || !(total > 0.0)) return std::nullopt;
  double e = 0.0;
  for (double l : L) {
    if (l > 0.0) {
      const double p = l / total;
      e -= p * std::log(p);
    }
  }
  return e;
}

double persistent_entropy(const std::vector<double>& L) { return persistent_entropy_checked(L).value_or(0.0); }

double diagram_norm(const PersistenceDiagram& diagram, int p, double p_norm) {
  if (!(p_norm > 0.0)) fail(ErrorCode::kInvalidParameter, "norm exponent must be positive");
  double acc = 0.0;
  for (double l : lifetimes(diagram, p)) acc += std::pow(l, p_norm);
  return std::pow(acc, 1.0 / p_norm);
}

std::size_t persistent_betti(const PersistenceDiagram& diagram, int p, double r_k, double r_l) {
  std::size_t count = 0;
  for (const auto& q : diagram.points) {
    if (q.dim == p && q.birth <= r_k && q.death > r_l) ++count;
  }
  return count;
}

FeatureVector summary_variables(const std::vector<double>& L, int p, const std::string& prefix,
                                const VectorizeParams& params) {
  const std::string base = prefix + "." + dim_tag(p) + ".";
  FeatureVector f;
  const auto mu = mean_of(L);
  f.add(base + "entropy", persistent_entropy_checked(L));
  f.add(base + "mean", mu);
  std::optional<double> var;
  if (mu) {
    double acc = 0.0;
    for (double l : L) acc += (l - *mu) * (l - *mu);
    var = acc / static_cast<double>(L.size());
  }
  f.add(base + "var", var);
  for (std::size_t i = 1; i <= 5; ++i) f.add(base + "L" + std::to_string(i), top(L, i));
  const double total = sum_of(L);
  f.add(base + "L1_over_sum", !L.empty() && total > 0.0 ? std::optional<double>(L[0] / total) : std::nullopt);
  f.add(base + "L1_over_mean", mu && *mu > 0.0 ? std::optional<double>(L[0] / *mu) : std::nullopt);
  f.add(base + "n_alpha", static_cast<double>(count_above(L, params.alpha)));
  return f;
}

FeatureVector betti_max_nrel_sum(const std::vector<double>& L, int p, const std::string& prefix,
                                 const VectorizeParams& params) {
  const std::string base = prefix + "." + dim_tag(p) + ".";
  FeatureVector f;
  if (L.empty()) {
    for (const char* name : {"betti", "max", "n_rel", "sum"}) f.add(base + name, std::nullopt);
    return f;
  }
  const double mx = L[0];
  const auto n_rel = std::count_if(L.begin(), L.end(), [&](double l) { return l >= mx * params.ratio; });
  f.add(base + "betti", static_cast<double>(L.size()));
  f.add(base + "max", mx);
  f.add(base + "n_rel", static_cast<double>(n_rel));
  f.add(base + "sum", sum_of(L));
  return f;
}

FeatureVector persistent_variables(const PersistenceDiagram& diagram, const std::vector<int>& dims,
                                   const std::string& prefix, const VectorizeParams& params) {
  std::vector<std::vector<double>> L(3);
  for (int p : dims) {
    if (p < 0 || p > 2) fail(ErrorCode::kInvalidParameter, "homology dimension must be 0, 1 or 2");
    L[static_cast<std::size_t>(p)] = lifetimes(diagram, p);
  }
  FeatureVector f;
  for (int p : dims) {
    const auto& Lp = L[static_cast<std::size_t>(p)];
    f.append(summary_variables(Lp, p, prefix, params));
    f.append(betti_max_nrel_sum(Lp, p, prefix, params));
    f.add(prefix + "." + dim_tag(p) + ".norm2", diagram_norm(diagram, p, 2.0));
  }
  for (std::size_t a = 0; a < dims.size(); ++a) {
    for (std::size_t b = 0; b < dims.size(); ++b) {
      const int p1 = dims[a], p2 = dims[b];
      if (p1 >= p2) continue;
      const auto& L1 = L[static_cast<std::size_t>(p1)];
      const auto& L2 = L[static_cast<std::size_t>(p2)];
      const std::string base = prefix + "." + dim_tag(p1) + dim_tag(p2) + ".";
      const auto mu1 = mean_of(L1), mu2 = mean_of(L2);
      f.add(base + "mean_ratio", mu1 && mu2 && *mu2 > 0.0 ? std::optional<double>(*mu1 / *mu2) : std::nullopt);
      const auto n1 = count_above(L1, params.alpha), n2 = count_above(L2, params.alpha);
      f.add(base + "n_alpha_ratio",
            n2 > 0 ? std::optional<double>(static_cast<double>(n1) / static_cast<double>(n2)) : std::nullopt);
      for (std::size_t i = 1; i <= 6; ++i) {
        const auto x = top(L1, i), y = top(L2, i);
        f.add(base + "prod" + std::to_string(i), x && y ? std::optional<double>(*x * *y) : std::nullopt);
      }
      for (std::size_t i = 1; i <= 6; ++i) {
        const auto x = top(L1, i), y = top(L2, i);
        const double next = top(L2, i + 1).value_or(0.0);
        f.add(base + "proddiff" + std::to_string(i), x && y ? std::optional<double>(*x * (*y - next)) : std::nullopt);
      }
    }
  }
  const bool has1 = std::find(dims.begin(), dims.end(), 1) != dims.end();
  const bool has2 = std::find(dims.begin(), dims.end(), 2) != dims.end();
  if (has1) {
    const auto l11 = top(L[1], 1), l12 = top(L[1], 2);
    f.add(prefix + ".H1.PS", l11 && l12 && *l11 > 0.0 ? std::optional<double>(1.0 - *l12 / *l11) : std::nullopt);
  }
  if (has1 && has2) {
    const auto l11 = top(L[1], 1), l12 = top(L[1], 2), l21 = top(L[2], 1), l22 = top(L[2], 2);
    f.add(prefix + ".H1H2.QPS", l12 && l21 ? std::optional<double>(*l12 * *l21) : std::nullopt);
    f.add(prefix + ".H1H2.FSS",
          l21 && l22 && l11 && *l11 > 0.0 ? std::optional<double>(*l21 * *l22 / *l11) : std::nullopt);
  }
  return f;
}

Silhouette silhouette(const std::vector<PersistencePair>& points, double t_min, double t_max, double gamma,
                      std::size_t nsample) {
  if (nsample == 0) fail(ErrorCode::kInvalidParameter, "nsample must be positive");
  Silhouette s;
  s.t_min = t_min;
  s.t_max = t_max;
  s.samples.assign(nsample, 0.0);
  double total = 0.0;
  for (const auto& q : points) total += std::pow(std::abs(q.death - q.birth), gamma);
  if (points.empty() || !(total > 0.0)) return s;
  const double step = (t_max - t_min) / static_cast<double>(nsample);
  if (!(step > 0.0)) return s;
  const auto last = static_cast<double>(nsample - 1);
  for (const auto& q : points) {
    const double w = std::pow(std::abs(q.death - q.birth), gamma) / total;
    if (w == 0.0) continue;
    // the tent is zero outside (birth, death)
    const double k_lo = std::clamp(std::floor((q.birth - t_min) / step), 0.0, last);
    const double k_hi = std::clamp(std::ceil((q.death - t_min) / step), 0.0, last);
    for (auto k = static_cast<std::size_t>(k_lo); k <= static_cast<std::size_t>(k_hi); ++k) {
      const double t = t_min + static_cast<double>(k) * step;
      const double tent = std::max(0.0, std::min(t - q.birth, q.death - t));
      s.samples[k] += w * tent;
    }
  }
  return s;
}

Silhouette silhouette(const PersistenceDiagram& diagram, int p, double gamma, std::size_t nsample) {
  const auto points = diagram.capped(p);
  double lo = 0.0, hi = 0.0;
  if (!points.empty()) {
    lo = points[0].birth;
    hi = points[0].death;
    for (const auto& q : points) {
      lo = std::min(lo, q.birth);
      hi = std::max(hi, q.death);
    }
  }
  return silhouette(points, lo, hi, gamma, nsample);
}

ImageDomain ImageDomain::empty() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {inf, -inf, inf, -inf};
}

void ImageDomain::include(const std::vector<PersistencePair>& points) {
  for (const auto& q : points) {
    x_min = std::min(x_min, q.birth);
    x_max = std::max(x_max, q.birth);
    y_min = std::min(y_min, q.death - q.birth);
    y_max = std::max(y_max, q.death - q.birth);
  }
}

ImageDomain ImageDomain::normalized() const {
  ImageDomain d = *this;
  if (!std::isfinite(d.x_min) || !std::isfinite(d.x_max)) d.x_min = d.x_max = 0.0;
  if (!std::isfinite(d.y_min) || !std::isfinite(d.y_max)) d.y_min = d.y_max = 0.0;
  if (!(d.x_max > d.x_min)) d.x_max = d.x_min + 1.0;
  if (!(d.y_max > d.y_min)) d.y_max = d.y_min + 1.0;
  return d;
}

double PersistenceImage::mass() const { return std::accumulate(pixels.begin(), pixels.end(), 0.0); }

PersistenceImage persistence_image(const std::vector<PersistencePair>& points, const ImageDomain& domain,
                                   std::size_t resolution, double weight_scale) {
  if (resolution == 0) fail(ErrorCode::kInvalidParameter, "image resolution must be positive");
  PersistenceImage img;
  img.resolution = resolution;
  img.domain = domain.normalized();
  img.pixels.assign(resolution * resolution, 0.0);
  const auto& d = img.domain;
  const double wx = (d.x_max - d.x_min) / static_cast<double>(resolution);
  const double wy = (d.y_max - d.y_min) / static_cast<double>(resolution);
  const double sx = wx / 2.0, sy = wy / 2.0;
  const double norm = 1.0 / (2.0 * M_PI * sx * sy);
  const double y_ref = d.y_max > 0.0 ? d.y_max : 1.0;
  std::vector<double> gx(resolution), gy(resolution);
  for (const auto& q : points) {
    const double x = q.birth, y = q.death - q.birth;
    const double w = weight_scale * y / y_ref;
    if (w == 0.0) continue;
    // separable Gaussian: integrate each axis once
    for (std::size_t c = 0; c < resolution; ++c) {
      const double u0 = d.x_min + static_cast<double>(c) * wx;
      double acc = 0.0;
      for (std::size_t i = 0; i < 4; ++i) {
        const double u = u0 + wx * (kGlNodes[i] + 1.0) / 2.0;
        acc += kGlWeights[i] * std::exp(-(u - x) * (u - x) / (2.0 * sx * sx));
      }
      gx[c] = acc * wx / 2.0;
    }
    for (std::size_t r = 0; r < resolution; ++r) {
      const double v0 = d.y_min + static_cast<double>(r) * wy;
      double acc = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        const double v = v0 + wy * (kGlNodes[j] + 1.0) / 2.0;
        acc += kGlWeights[j] * std::exp(-(v - y) * (v - y) / (2.0 * sy * sy));
      }
      gy[r] = acc * wy / 2.0;
    }
    for (std::size_t r = 0; r < resolution; ++r) {
      for (std::size_t c = 0; c < resolution; ++c) img.pixels[r * resolution + c] += w * norm * gy[r] * gx[c];
    }
  }
  return img;
}

}  // namespace topovox
