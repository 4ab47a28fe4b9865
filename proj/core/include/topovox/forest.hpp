#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace topovox {

/// Column-major design matrix with integer class targets.
struct Dataset {
  std::size_t n_rows = 0;
  std::vector<std::string> feature_names;
  std::vector<double> x;  // x[j * n_rows + i]
  std::vector<int> y;
  std::vector<std::string> classes;

  std::size_t n_features() const { return feature_names.size(); }
  std::span<const double> column(std::size_t j) const { return {x.data() + j * n_rows, n_rows}; }
  double at(std::size_t row, std::size_t col) const { return x[col * n_rows + row]; }
  /// Copy restricted to the given feature indices.
  Dataset subset(const std::vector<std::size_t>& features) const;
  void validate() const;
};

struct ForestParams {
  std::size_t n_trees = 500;
  std::uint64_t seed = 0;
  std::size_t mtry = 0;     // 0 = floor(sqrt(#features))
  std::size_t threads = 0;  // 0 = hardware concurrency
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<std::uint32_t> in_bag;  // bootstrap multiplicity per row

  int predict(const Dataset& data, std::size_t row) const;
  int predict(std::span<const double> features) const;
};

struct ForestModel {
  ForestParams params;
  std::size_t mtry = 0;
  std::size_t n_classes = 0;
  std::vector<std::string> feature_names;
  std::vector<Tree> trees;
  std::vector<double> importance;  // mean decrease in Gini per feature, averaged over trees
  std::vector<int> oob_prediction;  // -1 when a row received no out-of-bag vote
  double oob_error = 0.0;

  int predict(std::span<const double> features) const;
};

/// Per-tree seed derived from the run seed; identical regardless of threading.
std::uint64_t tree_seed(std::uint64_t seed, std::size_t tree);

/// CART with Gini impurity grown to purity, bootstrap of size n per tree.
/// Throws kDegenerateTarget when fewer than two classes are present.
ForestModel train_forest(const Dataset& data, const ForestParams& params = {});

}  // namespace topovox
