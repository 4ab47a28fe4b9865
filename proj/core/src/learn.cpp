#include "topovox/learn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "json.hpp"
#include "topovox/csv.hpp"
#include "topovox/error.hpp"

namespace topovox {
namespace {

constexpr const char* kLabelColumns[] = {"id", "vowel", "speaker", "gender", "condition"};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

// "zeros.H0.L3" -> ("zeros", "H0.L3")
std::pair<std::string, std::string> split_representation(const std::string& name) {
  const auto dot = name.find('.');
  if (dot == std::string::npos) return {"", name};
  return {name.substr(0, dot), name.substr(dot + 1)};
}

}  // namespace

Problem parse_problem(const std::string& name) {
  if (name == "vowel") return Problem::kVowel;
  if (name == "gender") return Problem::kGender;
  if (name == "speaker") return Problem::kSpeaker;
  fail(ErrorCode::kInvalidParameter, "unknown problem '" + name + "' (expected vowel, gender or speaker)");
}

std::string to_string(Problem problem) {
  switch (problem) {
    case Problem::kVowel:
      return "vowel";
    case Problem::kGender:
      return "gender";
    case Problem::kSpeaker:
      return "speaker";
  }
  return "?";
}

const std::string& label_of(const RecordingLabels& labels, Problem problem) {
  switch (problem) {
    case Problem::kVowel:
      return labels.vowel;
    case Problem::kGender:
      return labels.gender;
    case Problem::kSpeaker:
      break;
  }
  return labels.speaker;
}

std::size_t FeatureTable::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) fail(ErrorCode::kInvalidParameter, "no feature column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

void FeatureTable::add_row(const std::string& id, const RecordingLabels& row_labels, const std::vector<double>& values) {
  if (values.size() != columns.size()) fail(ErrorCode::kPartialRow, "row " + id + " has the wrong number of values");
  ids.push_back(id);
  labels.push_back(row_labels);
  rows.push_back(values);
}

void write_feature_table(std::ostream& out, const FeatureTable& table) {
  csv::Row header(std::begin(kLabelColumns), std::end(kLabelColumns));
  header.insert(header.end(), table.columns.begin(), table.columns.end());
  csv::write_row(out, header);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& l = table.labels[i];
    csv::Row row{table.ids[i], l.vowel, l.speaker, l.gender, l.condition};
    for (double v : table.rows[i]) row.push_back(csv::format_double(v));
    csv::write_row(out, row);
  }
}

FeatureTable read_feature_table(std::istream& in) {
  const auto rows = csv::read_all(in);
  if (rows.empty()) fail(ErrorCode::kFormat, "feature table is empty");
  const auto& header = rows.front();
  constexpr std::size_t kFixed = std::size(kLabelColumns);
  if (header.size() < kFixed) fail(ErrorCode::kFormat, "feature table header too short");
  for (std::size_t k = 0; k < kFixed; ++k) {
    if (header[k] != kLabelColumns[k]) fail(ErrorCode::kFormat, std::string("expected column ") + kLabelColumns[k]);
  }
  FeatureTable table;
  table.columns.assign(header.begin() + kFixed, header.end());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != header.size()) fail(ErrorCode::kFormat, "feature table row " + std::to_string(r) + " is ragged");
    std::vector<double> values;
    values.reserve(table.columns.size());
    for (std::size_t k = kFixed; k < row.size(); ++k) values.push_back(csv::parse_double(row[k]));
    table.add_row(row[0], {row[1], row[2], row[3], row[4]}, values);
  }
  return table;
}

std::vector<std::string> columns_with_prefix(const FeatureTable& table, const std::vector<std::string>& prefixes) {
  std::vector<std::string> out;
  for (const auto& c : table.columns) {
    for (const auto& p : prefixes) {
      if (starts_with(c, p)) {
        out.push_back(c);
        break;
      }
    }
  }
  return out;
}

Dataset make_dataset(const FeatureTable& table, const std::vector<std::string>& columns, Problem problem) {
  Dataset data;
  data.n_rows = table.rows.size();
  std::set<std::string> classes;
  for (const auto& l : table.labels) {
    const auto& label = label_of(l, problem);
    if (label.empty()) fail(ErrorCode::kInvalidParameter, "recording without a " + to_string(problem) + " label");
    classes.insert(label);
  }
  data.classes.assign(classes.begin(), classes.end());
  for (const auto& l : table.labels) {
    const auto it = std::lower_bound(data.classes.begin(), data.classes.end(), label_of(l, problem));
    data.y.push_back(static_cast<int>(it - data.classes.begin()));
  }
  data.feature_names = columns;
  data.x.reserve(columns.size() * data.n_rows);
  for (const auto& c : columns) {
    const auto j = table.column_index(c);
    for (const auto& row : table.rows) data.x.push_back(row[j]);
  }
  return data;
}

Dataset drop_constant_features(const Dataset& data) {
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    const auto c = data.column(j);
    if (!c.empty() && std::any_of(c.begin(), c.end(), [&](double v) { return v != c[0]; })) keep.push_back(j);
  }
  return data.subset(keep);
}

std::size_t least_important(const std::vector<double>& importance, const std::vector<std::string>& names) {
  if (importance.empty() || importance.size() != names.size()) {
    fail(ErrorCode::kInvalidParameter, "importance and name lists disagree");
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < importance.size(); ++j) {
    if (importance[j] < importance[best] || (importance[j] == importance[best] && names[j] < names[best])) best = j;
  }
  return best;
}

StepwiseTrace stepwise_select(const Dataset& data, const ForestParams& params) {
  if (data.n_features() < 2) fail(ErrorCode::kInvalidParameter, "stepwise selection needs at least two variables");
  std::vector<std::size_t> active(data.n_features());
  for (std::size_t j = 0; j < active.size(); ++j) active[j] = j;
  StepwiseTrace trace;
  bool have_best = false;
  while (!active.empty()) {
    const Dataset sub = data.subset(active);
    const ForestModel model = train_forest(sub, params);
    if (!have_best || model.oob_error <= trace.best_oob) {
      // Later iterations have fewer variables, so <= prefers the smaller set.
      trace.best_oob = model.oob_error;
      trace.best_set = sub.feature_names;
      have_best = true;
    }
    const std::size_t drop = least_important(model.importance, sub.feature_names);
    trace.steps.push_back({sub.feature_names[drop], model.oob_error, active.size()});
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  return trace;
}

void write_trace_json(std::ostream& out, const StepwiseTrace& trace, const std::map<std::string, std::string>& meta) {
  nlohmann::ordered_json j;
  j["meta"] = meta;
  j["best_oob"] = trace.best_oob;
  j["best_set"] = trace.best_set;
  auto& steps = j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : trace.steps) {
    steps.push_back({{"removed", s.removed}, {"oob", s.oob}, {"n_variables", s.n_variables}});
  }
  out << j.dump(2) << "\n";
}

StepwiseTrace read_trace_json(std::istream& in, std::map<std::string, std::string>* meta) {
  nlohmann::json j;
  try {
    in >> j;
    StepwiseTrace trace;
    trace.best_oob = j.at("best_oob").get<double>();
    trace.best_set = j.at("best_set").get<std::vector<std::string>>();
    for (const auto& s : j.at("steps")) {
      trace.steps.push_back({s.at("removed").get<std::string>(), s.at("oob").get<double>(),
                             s.at("n_variables").get<std::size_t>()});
    }
    if (meta != nullptr) *meta = j.value("meta", std::map<std::string, std::string>{});
    return trace;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("malformed trace json: ") + e.what());
  }
}

std::string variable_family(const std::string& name, std::size_t* group_size) {
  if (group_size != nullptr) *group_size = 1;
  if (ends_with(name, ".missing") || starts_with(name, "mfcc.")) return "";
  const auto [repr, rest] = split_representation(name);
  const auto dot = rest.rfind('.');
  if (dot == std::string::npos) return rest;
  const std::string var = rest.substr(dot + 1);
  const std::string head = rest.substr(0, dot + 1);
  struct Group {
    const char* stem;
    std::size_t size;
  };
  for (const Group g : {Group{"proddiff", 6}, Group{"prod", 6}, Group{"L", 5}}) {
    const std::string stem = g.stem;
    if (var.size() > stem.size() && starts_with(var, stem) &&
        std::all_of(var.begin() + static_cast<std::ptrdiff_t>(stem.size()), var.end(), ::isdigit)) {
      if (group_size != nullptr) *group_size = g.size;
      return head + stem + "_i";
    }
  }
  return rest;
}

std::vector<VariableCount> count_best_model_variables(const std::vector<BestModel>& models,
                                                      const std::vector<std::string>& universe,
                                                      std::vector<std::string>* warnings) {
  static const std::vector<std::string> kRepresentations = {"surface", "zeros", "takens"};
  if (warnings != nullptr && models.size() < kExpectedBestModels) {
    warnings->push_back("only " + std::to_string(models.size()) + " of " + std::to_string(kExpectedBestModels) +
                        " best models available; percentages use the available count");
  }
  std::map<std::string, VariableCount> rows;
  std::map<std::string, std::set<std::string>> family_reprs;
  auto register_name = [&](const std::string& name) {
    std::size_t group = 1;
    const auto family = variable_family(name, &group);
    if (family.empty()) return;
    auto& row = rows[family];
    row.variable = family;
    row.group_size = group;
    family_reprs[family].insert(split_representation(name).first);
  };
  for (const auto& name : universe) register_name(name);
  for (const auto& m : models) {
    for (const auto& name : m.variables) register_name(name);
  }

  for (const auto& m : models) {
    // Distinct index-level names per family in this model, overall and per representation.
    std::map<std::string, std::set<std::string>> overall;
    std::map<std::string, std::map<std::string, std::set<std::string>>> by_repr;
    for (const auto& name : m.variables) {
      const auto family = variable_family(name);
      if (family.empty()) continue;
      const auto [repr, rest] = split_representation(name);
      overall[family].insert(rest);
      by_repr[family][repr].insert(rest);
    }
    for (auto& [family, row] : rows) {
      row.total_max += row.group_size;
      if (const auto it = overall.find(family); it != overall.end()) row.total += it->second.size();
      for (const auto& r : kRepresentations) {
        if (m.representation != r && m.representation != "all") continue;
        if (!family_reprs[family].count(r)) continue;
        row.per_representation_max[r] += row.group_size;
        std::size_t& count = row.per_representation[r];
        if (const auto it = by_repr.find(family); it != by_repr.end()) {
          if (const auto jt = it->second.find(r); jt != it->second.end()) count += jt->second.size();
        }
      }
    }
  }
  std::vector<VariableCount> out;
  for (auto& [family, row] : rows) {
    for (const auto& r : kRepresentations) {
      row.per_representation.try_emplace(r, 0);
      row.per_representation_max.try_emplace(r, 0);
    }
    out.push_back(row);
  }
  return out;
}

std::vector<double> project_2d(const Dataset& data, std::vector<double>* explained_variance) {
  const std::size_t n = data.n_rows;
  if (n < 3) fail(ErrorCode::kDegenerateSignal, "projection needs at least three rows");
  std::vector<std::size_t> usable;
  std::vector<double> mean, sd;
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    const auto c = data.column(j);
    double m = 0.0;
    for (double v : c) m += v;
    m /= static_cast<double>(n);
    double var = 0.0;
    for (double v : c) var += (v - m) * (v - m);
    var /= static_cast<double>(n);
    if (var > 0.0) {
      usable.push_back(j);
      mean.push_back(m);
      sd.push_back(std::sqrt(var));
    }
  }
  if (usable.empty()) fail(ErrorCode::kDegenerateSignal, "every feature is constant");
  const auto p = static_cast<Eigen::Index>(usable.size());
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const auto c = data.column(usable[static_cast<std::size_t>(k)]);
    for (std::size_t i = 0; i < n; ++i) {
      z(static_cast<Eigen::Index>(i), k) = (c[i] - mean[static_cast<std::size_t>(k)]) / sd[static_cast<std::size_t>(k)];
    }
  }
  const Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const auto& values = solver.eigenvalues();
  Eigen::MatrixXd axes(p, 2);
  axes.setZero();
  for (int a = 0; a < 2 && a < p; ++a) {
    Eigen::VectorXd v = solver.eigenvectors().col(p - 1 - a);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    axes.col(a) = v;
  }
  if (explained_variance != nullptr) {
    const double total = values.sum();
    explained_variance->clear();
    for (int a = 0; a < 2; ++a) {
      explained_variance->push_back(a < p && total > 0 ? std::max(0.0, values(p - 1 - a)) / total : 0.0);
    }
  }
  const Eigen::MatrixXd scores = z * axes;
  std::vector<double> out(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = scores(static_cast<Eigen::Index>(i), 0);
    out[2 * i + 1] = scores(static_cast<Eigen::Index>(i), 1);
  }
  return out;
}

}  // namespace topovox
