#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "topovox/delaunay.hpp"
#include "topovox/representations.hpp"

namespace topovox {

struct Simplex {
  std::array<std::uint32_t, 4> vertices{};  // first dim+1 entries used, ascending
  std::uint8_t dim = 0;
  double value = 0.0;
};

struct FilteredSimplicialComplex {
  std::size_t dim = 0;
  std::vector<Simplex> simplices;  // sorted by (value, dim, vertices)

  void add(std::initializer_list<std::uint32_t> vertices, double value);
  void sort();
};

/// Grid of vertex values, row-major. Edges and squares take the max of their
/// corner values.
struct FilteredCubicalComplex {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::size_t cell_count() const;
};

struct PersistencePair {
  double birth = 0.0;
  double death = 0.0;
  int dim = 0;

  bool essential() const { return death == std::numeric_limits<double>::infinity(); }
  double lifetime() const { return death - birth; }
};

struct PersistenceDiagram {
  std::vector<PersistencePair> points;
  double min_value = 0.0;
  double max_value = 0.0;  // cap used for essential classes downstream

  std::vector<PersistencePair> in_dim(int p) const;
  /// Points of dimension p with essential deaths replaced by max_value.
  std::vector<PersistencePair> capped(int p) const;
  std::size_t betti(int p, double r) const;
};

inline constexpr double kAlphaDegenerateVolume = 1e-14;

FilteredSimplicialComplex alpha_filtration(const PointCloud& points);
FilteredSimplicialComplex alpha_filtration(const Triangulation& triangulation);

/// Throws kTooShort for fewer than two cells.
FilteredCubicalComplex cubical_filtration(std::vector<double> values, std::size_t rows, std::size_t cols);
/// Vertex (frame, bin) = -log(power + kPowerFloor).
FilteredCubicalComplex cubical_sublevel_filtration(const SpectrogramSurface& surface);

PersistenceDiagram compute_persistence(const FilteredSimplicialComplex& complex);
PersistenceDiagram compute_persistence(const FilteredCubicalComplex& complex);

/// Exact bottleneck distance restricted to dimension p. Essential classes are
/// cut at the larger of the two diagrams' max_value.
double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int p);
double bottleneck_distance(std::vector<PersistencePair> a, std::vector<PersistencePair> b);

void write_diagram_csv_header(std::ostream& out);
void write_diagram_csv(std::ostream& out, const std::string& recording_id, const std::string& representation,
                       const PersistenceDiagram& diagram);

}  // namespace topovox
