#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "topovox/homology.hpp"

namespace topovox {

struct VectorizeParams {
  double alpha = 0.05;  // N_{p,alpha} threshold, filtration units
  double ratio = 0.25;  // n_rel threshold relative to the longest lifetime
  double gamma = 1.0;
  std::size_t nsample = 512;
  std::size_t resolution = 10;
};

/// Ordered name -> value list. Every variable is followed by a `.missing`
/// flag that is 1 when its formula was undefined (the value is then 0).
struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;

  void add(const std::string& name, std::optional<double> value);
  void append(const FeatureVector& other);
  std::optional<double> get(const std::string& name) const;
  bool missing(const std::string& name) const;
};

/// Capped lifetimes of dimension p, sorted descending.
std::vector<double> lifetimes(const PersistenceDiagram& diagram, int p);
/// 0 for an empty or all-zero list.
double persistent_entropy(const std::vector<double>& lifetimes);
std::optional<double> persistent_entropy_checked(const std::vector<double>& lifetimes);
double diagram_norm(const PersistenceDiagram& diagram, int p, double p_norm = 2.0);
/// #{bars born at or before r_k and still alive after r_l}.
std::size_t persistent_betti(const PersistenceDiagram& diagram, int p, double r_k, double r_l);

/// Items i-xiii plus entropy, Betti/max/n_rel/sum and the 2-norm, named
/// `<prefix>.H{p}.<var>` (cross-dimension terms use `H{p1}H{p2}`).
FeatureVector persistent_variables(const PersistenceDiagram& diagram, const std::vector<int>& dims,
                                   const std::string& prefix, const VectorizeParams& params = {});

/// Per-dimension block only (used by persistent_variables).
FeatureVector summary_variables(const std::vector<double>& lifetimes, int p, const std::string& prefix,
                                const VectorizeParams& params = {});
FeatureVector betti_max_nrel_sum(const std::vector<double>& lifetimes, int p, const std::string& prefix,
                                 const VectorizeParams& params = {});

struct Silhouette {
  double t_min = 0.0;
  double t_max = 0.0;
  std::vector<double> samples;
};

/// Samples at t_k = t_min + k (t_max - t_min) / nsample, k = 0..nsample-1.
Silhouette silhouette(const std::vector<PersistencePair>& capped_points, double t_min, double t_max,
                      double gamma = 1.0, std::size_t nsample = 512);
/// Domain [min birth, max death] of the capped dimension-p points.
Silhouette silhouette(const PersistenceDiagram& diagram, int p, double gamma = 1.0, std::size_t nsample = 512);

/// Rectangle in (birth, persistence) coordinates.
struct ImageDomain {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;

  /// Inverted extents, ready for include().
  static ImageDomain empty();
  void include(const std::vector<PersistencePair>& capped_points);
  /// Widens empty or zero-width extents to 1 so pixel sizes stay positive.
  ImageDomain normalized() const;
};

struct PersistenceImage {
  std::size_t resolution = 0;
  ImageDomain domain;
  std::vector<double> pixels;  // row-major, row = persistence index

  double at(std::size_t row, std::size_t col) const { return pixels[row * resolution + col]; }
  double mass() const;
};

/// Weight w(x, y) = y / domain.y_max; Gaussian sigma = half a pixel on each
/// axis; each pixel integrated by 4x4 Gauss-Legendre quadrature.
PersistenceImage persistence_image(const std::vector<PersistencePair>& capped_points, const ImageDomain& domain,
                                   std::size_t resolution = 10, double weight_scale = 1.0);

}  // namespace topovox
