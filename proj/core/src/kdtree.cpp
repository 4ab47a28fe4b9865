#include "kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace topovox::detail {
namespace {
constexpr std::size_t kLeafSize = 12;
}

ChebyshevKdTree::ChebyshevKdTree(std::span<const double> coords, std::size_t dim, std::size_t count)
    : coords_(coords), dim_(dim), order_(count) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * count / kLeafSize + 2);
  if (count > 0) build(0, count);  // root lands at index 0, so a child index of 0 marks a leaf
}

std::size_t ChebyshevKdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.emplace_back();
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo.assign(dim_, std::numeric_limits<double>::infinity());
  node.hi.assign(dim_, -std::numeric_limits<double>::infinity());
  for (std::size_t k = begin; k < end; ++k) {
    for (std::size_t a = 0; a < dim_; ++a) {
      const double v = coord(order_[k], a);
      node.lo[a] = std::min(node.lo[a], v);
      node.hi[a] = std::max(node.hi[a], v);
    }
  }
  if (end - begin > kLeafSize) {
    std::size_t axis = 0;
    for (std::size_t a = 1; a < dim_; ++a) {
      if (node.hi[a] - node.lo[a] > node.hi[axis] - node.lo[axis]) axis = a;
    }
    if (node.hi[axis] > node.lo[axis]) {
      const std::size_t mid = begin + (end - begin) / 2;
      std::nth_element(order_.begin() + static_cast<long>(begin), order_.begin() + static_cast<long>(mid),
                       order_.begin() + static_cast<long>(end),
                       [&](std::size_t x, std::size_t y) { return coord(x, axis) < coord(y, axis); });
      node.split_dim = axis;
      node.split = coord(order_[mid], axis);
      node.left = build(begin, mid);
      node.right = build(mid, end);
    }
  }
  nodes_[id] = std::move(node);
  return id;
}

ChebyshevKdTree::Hit ChebyshevKdTree::nearest(std::span<const double> query, double min_distance) const {
  Hit best;
  if (!order_.empty()) search(0, query, min_distance, best);
  return best;
}

void ChebyshevKdTree::search(std::size_t id, std::span<const double> query, double min_distance,
                             Hit& best) const {
  const Node& node = nodes_[id];
  double box = 0.0;
  for (std::size_t a = 0; a < dim_; ++a) {
    const double q = query[a];
    const double gap = q < node.lo[a] ? node.lo[a] - q : (q > node.hi[a] ? q - node.hi[a] : 0.0);
    box = std::max(box, gap);
  }
  if (box >= best.distance) return;

  if (node.left == 0) {
    for (std::size_t k = node.begin; k < node.end; ++k) {
      const std::size_t p = order_[k];
      double d = 0.0;
      const double* c = coords_.data() + p * dim_;
      for (std::size_t a = 0; a < dim_ && d < best.distance; ++a) d = std::max(d, std::abs(c[a] - query[a]));
      if (d > min_distance && d < best.distance) best = {p, d};
    }
    return;
  }
  const bool go_left = query[node.split_dim] < node.split;
  search(go_left ? node.left : node.right, query, min_distance, best);
  search(go_left ? node.right : node.left, query, min_distance, best);
}

}  // namespace topovox::detail
