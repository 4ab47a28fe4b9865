#include "topovox/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "topovox/error.hpp"

namespace topovox {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int majority(const std::vector<std::uint32_t>& counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, std::size_t n_classes, std::size_t mtry)
      : data_(data), n_classes_(n_classes), mtry_(mtry) {}

  // Returns the impurity decrease credited to each feature.
  Tree build(std::uint64_t seed, std::vector<double>& importance) {
    std::mt19937_64 rng(seed);
    const std::size_t n = data_.n_rows;
    Tree tree;
    tree.in_bag.assign(n, 0);
    std::vector<std::uint32_t> idx(n);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<std::uint32_t>(pick(rng));
      idx[i] = r;
      ++tree.in_bag[r];
    }
    std::sort(idx.begin(), idx.end());

    std::vector<std::size_t> features(data_.n_features());
    std::iota(features.begin(), features.end(), 0);
    importance.assign(data_.n_features(), 0.0);

    struct Task {
      std::size_t begin, end;
      int node;
    };
    std::vector<Task> stack;
    tree.nodes.push_back({});
    stack.push_back({0, n, 0});
    std::vector<std::uint32_t> counts(n_classes_);
    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      std::fill(counts.begin(), counts.end(), 0u);
      for (std::size_t i = task.begin; i < task.end; ++i) ++counts[static_cast<std::size_t>(data_.y[idx[i]])];
      const int label = majority(counts);
      tree.nodes[static_cast<std::size_t>(task.node)].label = label;
      const std::size_t total = task.end - task.begin;
      if (counts[static_cast<std::size_t>(label)] == total) continue;

      double parent_sq = 0.0;
      for (auto c : counts) parent_sq += static_cast<double>(c) * static_cast<double>(c);
      parent_sq /= static_cast<double>(total);

      Split best;
      std::size_t usable = 0;
      for (std::size_t k = 0; k < features.size() && usable < mtry_; ++k) {
        std::uniform_int_distribution<std::size_t> draw(k, features.size() - 1);
        std::swap(features[k], features[draw(rng)]);
        const std::size_t f = features[k];
        if (evaluate(f, idx, task.begin, task.end, counts, parent_sq, best)) ++usable;
      }
      if (best.feature < 0) continue;  // every feature constant on this node

      importance[static_cast<std::size_t>(best.feature)] += best.gain / static_cast<double>(n);
      const auto column = data_.column(static_cast<std::size_t>(best.feature));
      const auto mid = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(task.begin),
                                      idx.begin() + static_cast<std::ptrdiff_t>(task.end),
                                      [&](std::uint32_t r) { return column[r] <= best.threshold; });
      const std::size_t split = static_cast<std::size_t>(mid - idx.begin());
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back({});
      tree.nodes.push_back({});
      TreeNode& node = tree.nodes[static_cast<std::size_t>(task.node)];
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.left = left;
      node.right = left + 1;
      stack.push_back({split, task.end, left + 1});
      stack.push_back({task.begin, split, left});
    }
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  // Scans all thresholds of feature f; returns false when f is constant here.
  bool evaluate(std::size_t f, const std::vector<std::uint32_t>& idx, std::size_t begin, std::size_t end,
                const std::vector<std::uint32_t>& counts, double parent_sq, Split& best) {
    const auto column = data_.column(f);
    buffer_.clear();
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = column[idx[i]];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      buffer_.push_back({v, data_.y[idx[i]]});
    }
    if (!(hi > lo)) return false;
    std::sort(buffer_.begin(), buffer_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    left_.assign(n_classes_, 0u);
    right_.assign(counts.begin(), counts.end());
    double sq_left = 0.0, sq_right = 0.0;
    for (auto c : counts) sq_right += static_cast<double>(c) * static_cast<double>(c);
    const std::size_t total = end - begin;
    for (std::size_t i = 0; i + 1 < total; ++i) {
      const auto k = static_cast<std::size_t>(buffer_[i].second);
      sq_left += 2.0 * left_[k] + 1.0;
      sq_right -= 2.0 * right_[k] - 1.0;
      ++left_[k];
      --right_[k];
      if (buffer_[i].first == buffer_[i + 1].first) continue;
      const double nl = static_cast<double>(i + 1), nr = static_cast<double>(total - i - 1);
      const double gain = sq_left / nl + sq_right / nr - parent_sq;
      if (gain > best.gain + 1e-12 * parent_sq || best.feature < 0) {
        best.feature = static_cast<int>(f);
        double thr = 0.5 * (buffer_[i].first + buffer_[i + 1].first);
        if (!(thr < buffer_[i + 1].first)) thr = buffer_[i].first;
        best.threshold = thr;
        best.gain = gain;
      }
    }
    return true;
  }

  const Dataset& data_;
  std::size_t n_classes_;
  std::size_t mtry_;
  std::vector<std::pair<double, int>> buffer_;
  std::vector<std::uint32_t> left_, right_;
};

}  // namespace

Dataset Dataset::subset(const std::vector<std::size_t>& features) const {
  Dataset out;
  out.n_rows = n_rows;
  out.y = y;
  out.classes = classes;
  out.x.reserve(features.size() * n_rows);
  for (auto j : features) {
    if (j >= n_features()) fail(ErrorCode::kInvalidParameter, "feature index out of range");
    out.feature_names.push_back(feature_names[j]);
    const auto c = column(j);
    out.x.insert(out.x.end(), c.begin(), c.end());
  }
  return out;
}

void Dataset::validate() const {
  if (x.size() != n_rows * feature_names.size()) fail(ErrorCode::kInvalidParameter, "design matrix shape mismatch");
  if (y.size() != n_rows) fail(ErrorCode::kInvalidParameter, "target length mismatch");
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorCode::kInvalidParameter, "design matrix contains NaN or Inf");
  }
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes.size()) {
      fail(ErrorCode::kInvalidParameter, "class index out of range");
    }
  }
}

int Tree::predict(const Dataset& data, std::size_t row) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(node)];
    node = data.at(row, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)].label;
}

int Tree::predict(std::span<const double> features) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(node)];
    node = features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)].label;
}

int ForestModel::predict(std::span<const double> features) const {
  if (features.size() != feature_names.size()) fail(ErrorCode::kInvalidParameter, "feature count mismatch");
  std::vector<std::uint32_t> votes(n_classes, 0);
  for (const auto& t : trees) ++votes[static_cast<std::size_t>(t.predict(features))];
  return majority(votes);
}

std::uint64_t tree_seed(std::uint64_t seed, std::size_t tree) { return splitmix64(seed + tree); }

ForestModel train_forest(const Dataset& data, const ForestParams& params) {
  data.validate();
  if (data.n_rows == 0) fail(ErrorCode::kEmptyInput, "no rows to train on");
  if (data.n_features() == 0) fail(ErrorCode::kInvalidParameter, "no features to train on");
  if (params.n_trees == 0) fail(ErrorCode::kInvalidParameter, "n_trees must be positive");
  std::vector<bool> present(data.classes.size(), false);
  for (int label : data.y) present[static_cast<std::size_t>(label)] = true;
  if (std::count(present.begin(), present.end(), true) < 2) {
    fail(ErrorCode::kDegenerateTarget, "target has fewer than two classes");
  }

  ForestModel model;
  model.params = params;
  model.n_classes = data.classes.size();
  model.feature_names = data.feature_names;
  model.mtry = params.mtry != 0 ? std::min(params.mtry, data.n_features())
                                : std::max<std::size_t>(1, static_cast<std::size_t>(
                                                               std::floor(std::sqrt(double(data.n_features())))));
  model.trees.resize(params.n_trees);
  std::vector<std::vector<double>> importance(params.n_trees);

  std::size_t threads = params.threads != 0 ? params.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, params.n_trees);
  auto work = [&](std::size_t offset) {
    TreeBuilder builder(data, model.n_classes, model.mtry);
    for (std::size_t t = offset; t < params.n_trees; t += threads) {
      model.trees[t] = builder.build(tree_seed(params.seed, t), importance[t]);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(work, k);
    for (auto& th : pool) th.join();
  }

  model.importance.assign(data.n_features(), 0.0);
  for (const auto& imp : importance) {
    for (std::size_t j = 0; j < imp.size(); ++j) model.importance[j] += imp[j];
  }
  for (double& v : model.importance) v /= static_cast<double>(params.n_trees);

  std::vector<std::uint32_t> votes(data.n_rows * model.n_classes, 0);
  for (const auto& tree : model.trees) {
    for (std::size_t i = 0; i < data.n_rows; ++i) {
      if (tree.in_bag[i] == 0) ++votes[i * model.n_classes + static_cast<std::size_t>(tree.predict(data, i))];
    }
  }
  model.oob_prediction.assign(data.n_rows, -1);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < data.n_rows; ++i) {
    const auto begin = votes.begin() + static_cast<std::ptrdiff_t>(i * model.n_classes);
    const auto end = begin + static_cast<std::ptrdiff_t>(model.n_classes);
    const auto best = std::max_element(begin, end);
    if (*best > 0) model.oob_prediction[i] = static_cast<int>(best - begin);
    if (model.oob_prediction[i] != data.y[i]) ++errors;
  }
  model.oob_error = static_cast<double>(errors) / static_cast<double>(data.n_rows);
  return model;
}

}  // namespace topovox
