#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace topovox::detail {

/// Static k-d tree over a point-major coordinate array, answering exact
/// nearest-neighbour queries in the Chebyshev (max) norm.
class ChebyshevKdTree {
 public:
  ChebyshevKdTree(std::span<const double> coords, std::size_t dim, std::size_t count);

  struct Hit {
    std::size_t index = 0;
    double distance = std::numeric_limits<double>::infinity();
  };

  /// Nearest point to `query` whose distance is strictly greater than
  /// `min_distance` (use it to skip the query point and exact duplicates).
  Hit nearest(std::span<const double> query, double min_distance) const;

 private:
  struct Node {
    std::size_t begin = 0, end = 0;  // range in order_
    std::size_t left = 0, right = 0; // child nodes, 0 for leaves
    std::size_t split_dim = 0;
    double split = 0.0;
    std::vector<double> lo, hi;      // bounding box
  };

  std::size_t build(std::size_t begin, std::size_t end);
  void search(std::size_t node, std::span<const double> query, double min_distance, Hit& best) const;
  double coord(std::size_t point, std::size_t axis) const { return coords_[point * dim_ + axis]; }

  std::span<const double> coords_;
  std::size_t dim_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace topovox::detail
