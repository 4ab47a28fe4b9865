#pragma once

// Slow, independent reference implementations used only by the tests.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "topovox/homology.hpp"
#include "topovox/representations.hpp"

namespace oracle {

using Cell = std::vector<std::uint32_t>;  // sorted vertex list

/// Betti numbers over Z/2 of a closed simplicial complex (all faces listed),
/// from dense boundary-matrix ranks. Index p = dimension.
std::vector<std::size_t> simplicial_betti(const std::vector<Cell>& simplices, std::size_t max_dim);

/// Betti numbers of the subcomplex {sigma : value(sigma) <= r}.
std::vector<std::size_t> betti_bruteforce(const topovox::FilteredSimplicialComplex& complex, double r);

/// Betti numbers of the sublevel set {grid <= r} of a vertex-valued grid,
/// built from its own vertex/edge/square cells (4-connectivity).
std::vector<std::size_t> cubical_betti_bruteforce(const std::vector<double>& grid, std::size_t rows,
                                                  std::size_t cols, double r);

/// Delaunay triangles by the empty-circumcircle test over all triples.
std::vector<std::array<std::uint32_t, 3>> delaunay_2d_bruteforce(const topovox::PointCloud& cloud);

/// 2D alpha filtration (radius convention) from the brute-force Delaunay
/// triangles: triangles at their circumradius, Gabriel edges at half their
/// length, attached edges at the circumradius of the triangle they are
/// attached to, vertices at 0.
topovox::FilteredSimplicialComplex alpha_2d_bruteforce(const topovox::PointCloud& cloud);

/// Half the edge lengths of a Euclidean minimum spanning tree (Kruskal over
/// all pairs), sorted ascending. These are the finite H0 deaths of the alpha
/// filtration.
std::vector<double> half_mst_lengths(const topovox::PointCloud& cloud);

/// Bottleneck distance by exhaustive matching over augmented diagrams
/// (finite points only, at most 4 points per side).
double bottleneck_bruteforce(const std::vector<topovox::PersistencePair>& a,
                             const std::vector<topovox::PersistencePair>& b);

/// |DFT_k|^2 of the zero-padded frame, k = 0..n/2, by direct summation.
std::vector<double> dft_power(std::span<const double> frame, std::size_t n);

/// Closed-form integral of a normalized 2D Gaussian over a rectangle.
double gaussian_rect_mass(double mx, double my, double sx, double sy, double x0, double x1, double y0, double y1);

}  // namespace oracle
