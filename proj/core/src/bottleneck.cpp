#include <algorithm>
#include <cmath>
#include <queue>

#include "topovox/homology.hpp"

namespace topovox {
namespace {

double linf(const PersistencePair& a, const PersistencePair& b) {
  return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double to_diagonal(const PersistencePair& a) { return (a.death - a.birth) / 2.0; }

// Left side: points of A, then diagonal copies of B. Right side: points of B,
// then diagonal copies of A. Diagonal-to-diagonal edges are free.
class Matching {
 public:
  Matching(const std::vector<PersistencePair>& a, const std::vector<PersistencePair>& b, double delta)
      : a_(a), b_(b), delta_(delta), n_(a.size() + b.size()), match_left_(n_, -1), match_right_(n_, -1),
        layer_(n_) {}

  bool perfect() {
    std::size_t matched = 0;
    while (bfs()) {
      for (std::size_t u = 0; u < n_; ++u) {
        if (match_left_[u] < 0 && dfs(static_cast<int>(u))) ++matched;
      }
    }
    return matched == n_;
  }

 private:
  template <typename F>
  void for_each_neighbor(int u, F&& f) const {
    const std::size_t m = a_.size(), k = b_.size();
    if (static_cast<std::size_t>(u) < m) {
      const auto& p = a_[static_cast<std::size_t>(u)];
      for (std::size_t j = 0; j < k; ++j) {
        if (linf(p, b_[j]) <= delta_ && !f(static_cast<int>(j))) return;
      }
      if (to_diagonal(p) <= delta_) f(static_cast<int>(k + static_cast<std::size_t>(u)));
    } else {
      const std::size_t j = static_cast<std::size_t>(u) - m;
      if (to_diagonal(b_[j]) <= delta_ && !f(static_cast<int>(j))) return;
      for (std::size_t i = 0; i < m; ++i) {
        if (!f(static_cast<int>(k + i))) return;
      }
    }
  }

  bool bfs() {
    std::queue<int> queue;
    bool found = false;
    for (std::size_t u = 0; u < n_; ++u) {
      if (match_left_[u] < 0) {
        layer_[u] = 0;
        queue.push(static_cast<int>(u));
      } else {
        layer_[u] = -1;
      }
    }
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop();
      for_each_neighbor(u, [&](int v) {
        const int w = match_right_[static_cast<std::size_t>(v)];
        if (w < 0) {
          found = true;
        } else if (layer_[static_cast<std::size_t>(w)] < 0) {
          layer_[static_cast<std::size_t>(w)] = layer_[static_cast<std::size_t>(u)] + 1;
          queue.push(w);
        }
        return true;
      });
    }
    return found;
  }

  bool dfs(int u) {
    bool done = false;
    for_each_neighbor(u, [&](int v) {
      const int w = match_right_[static_cast<std::size_t>(v)];
      if (w < 0 || (layer_[static_cast<std::size_t>(w)] == layer_[static_cast<std::size_t>(u)] + 1 && dfs(w))) {
        match_left_[static_cast<std::size_t>(u)] = v;
        match_right_[static_cast<std::size_t>(v)] = u;
        done = true;
        return false;
      }
      return true;
    });
    if (!done) layer_[static_cast<std::size_t>(u)] = -1;
    return done;
  }

  const std::vector<PersistencePair>& a_;
  const std::vector<PersistencePair>& b_;
  double delta_;
  std::size_t n_;
  std::vector<int> match_left_, match_right_, layer_;
};

}  // namespace

double bottleneck_distance(std::vector<PersistencePair> a, std::vector<PersistencePair> b) {
  std::erase_if(a, [](const PersistencePair& p) { return !(p.death > p.birth); });
  std::erase_if(b, [](const PersistencePair& p) { return !(p.death > p.birth); });
  std::vector<double> candidates;
  candidates.push_back(0.0);
  for (const auto& p : a) candidates.push_back(to_diagonal(p));
  for (const auto& q : b) candidates.push_back(to_diagonal(q));
  for (const auto& p : a) {
    for (const auto& q : b) candidates.push_back(linf(p, q));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::size_t lo = 0, hi = candidates.size() - 1;  // candidates[hi] is always feasible
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (Matching(a, b, candidates[mid]).perfect()) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return candidates[lo];
}

double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int p) {
  const double cap = std::max(a.max_value, b.max_value);
  auto truncate = [cap](std::vector<PersistencePair> points) {
    for (auto& q : points) {
      if (q.essential()) q.death = std::max(cap, q.birth);
    }
    return points;
  };
  return bottleneck_distance(truncate(a.in_dim(p)), truncate(b.in_dim(p)));
}

}  // namespace topovox
