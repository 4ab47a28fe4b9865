#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "topovox/audio_io.hpp"
#include "topovox/forest.hpp"

namespace topovox {

enum class Problem { kVowel, kGender, kSpeaker };

Problem parse_problem(const std::string& name);
std::string to_string(Problem problem);
const std::string& label_of(const RecordingLabels& labels, Problem problem);

/// One row per recording; columns are named features.
struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<RecordingLabels> labels;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const;  // throws kInvalidParameter
  void add_row(const std::string& id, const RecordingLabels& labels, const std::vector<double>& values);
};

void write_feature_table(std::ostream& out, const FeatureTable& table);
/// Inverse of write_feature_table.
FeatureTable read_feature_table(std::istream& in);

/// Columns whose name starts with one of `prefixes` (e.g. "zeros.", "mfcc.").
std::vector<std::string> columns_with_prefix(const FeatureTable& table, const std::vector<std::string>& prefixes);

/// Classes are the sorted distinct labels of the chosen problem.
Dataset make_dataset(const FeatureTable& table, const std::vector<std::string>& columns, Problem problem);

/// Drops features that take a single value over all rows.
Dataset drop_constant_features(const Dataset& data);

/// Index of the least important feature; ties go to the lexicographically
/// smallest name.
std::size_t least_important(const std::vector<double>& importance, const std::vector<std::string>& names);

struct StepwiseStep {
  std::string removed;
  double oob = 0.0;  // OOB of the model trained just before `removed` was dropped
  std::size_t n_variables = 0;
};

struct StepwiseTrace {
  std::vector<StepwiseStep> steps;
  std::vector<std::string> best_set;
  double best_oob = 1.0;
};

/// Backward elimination by impurity importance until no variable is left.
/// The best set is the one with minimal OOB; ties go to the smaller set.
StepwiseTrace stepwise_select(const Dataset& data, const ForestParams& params = {});

void write_trace_json(std::ostream& out, const StepwiseTrace& trace, const std::map<std::string, std::string>& meta);
StepwiseTrace read_trace_json(std::istream& in, std::map<std::string, std::string>* meta = nullptr);

/// One best model for the variable-frequency table.
struct BestModel {
  Problem problem = Problem::kVowel;
  std::string representation;  // surface, zeros, takens or all
  bool with_mfcc = false;
  std::vector<std::string> variables;
};

struct VariableCount {
  std::string variable;  // name without representation prefix, e.g. "H0.betti"
  std::size_t group_size = 1;
  std::size_t total = 0;
  std::size_t total_max = 0;
  std::map<std::string, std::size_t> per_representation;
  std::map<std::string, std::size_t> per_representation_max;

  double percent() const { return total_max == 0 ? 0.0 : 100.0 * static_cast<double>(total) / double(total_max); }
};

/// Family key of a persistent variable: grouped families (top lifetimes,
/// products, product differences) collapse their index; flags and MFCC
/// columns return an empty string.
std::string variable_family(const std::string& name, std::size_t* group_size = nullptr);

inline constexpr std::size_t kExpectedBestModels = 24;

/// Presence counts over best models. Families listed in `universe` (full
/// column names) appear even with zero counts; a representation whose columns
/// never contain a family gets max 0 for it. `warnings` receives a message
/// when fewer than the expected 24 models are supplied.
std::vector<VariableCount> count_best_model_variables(const std::vector<BestModel>& models,
                                                      const std::vector<std::string>& universe = {},
                                                      std::vector<std::string>* warnings = nullptr);

/// Top-2 principal components of standardized features, row-major n x 2.
/// Throws kDegenerateSignal when every column is constant or n < 3.
std::vector<double> project_2d(const Dataset& data, std::vector<double>* explained_variance = nullptr);

}  // namespace topovox
