#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "topovox/representations.hpp"

namespace topovox {

/// Delaunay triangulation of a 2D or 3D cloud. `cells` hold dim+1 vertex ids
/// (ascending) into `vertices`, which are the input points with exact
/// duplicates merged.
struct Triangulation {
  std::size_t dim = 0;
  PointCloud vertices;
  std::vector<std::array<std::uint32_t, 4>> cells;
  /// For every input point, the vertex it was merged into.
  std::vector<std::uint32_t> vertex_of_input;
};

/// Incremental (Bowyer-Watson) insertion with exact orientation and in-sphere
/// predicates. Degenerate positions are broken by a deterministic hash-based
/// jitter of 1e-12 times the bounding-box extent, applied to predicates only.
/// Throws kDegenerateGeometry when fewer than dim+1 affinely independent points
/// exist.
Triangulation delaunay(const PointCloud& points);

/// Unique points in input order plus the input -> unique map. Points within
/// 1e-9 of the cloud extent (max norm) of an earlier kept point are merged.
PointCloud merge_duplicates(const PointCloud& points, std::vector<std::uint32_t>& vertex_of_input);

}  // namespace topovox
