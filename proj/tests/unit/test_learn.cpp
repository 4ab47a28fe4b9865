#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "topovox/error.hpp"
#include "topovox/learn.hpp"

using namespace topovox;

namespace {

// Column 0 carries the label with some overlap; the rest are pure noise.
Dataset one_informative(std::size_t n, std::size_t noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset d;
  d.n_rows = n;
  d.classes = {"a", "b"};
  d.feature_names.push_back("signal");
  for (std::size_t j = 0; j < noise; ++j) d.feature_names.push_back("noise" + std::to_string(j));
  d.x.resize(n * (noise + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    d.y.push_back(y);
    d.x[i] = 1.5 * y + g(rng);
    for (std::size_t j = 1; j <= noise; ++j) d.x[j * n + i] = g(rng);
  }
  return d;
}

}  // namespace

TEST(Problem, Names) {
  EXPECT_EQ(parse_problem("vowel"), Problem::kVowel);
  EXPECT_EQ(parse_problem("gender"), Problem::kGender);
  EXPECT_EQ(parse_problem("speaker"), Problem::kSpeaker);
  EXPECT_EQ(to_string(Problem::kSpeaker), "speaker");
  EXPECT_THROW(parse_problem("age"), Error);
}

TEST(FeatureTable, CsvRoundTripIsExact) {
  FeatureTable t;
  t.columns = {"mfcc.c0", "zeros.H0.betti", "zeros.H0.betti.missing"};
  t.add_row("r1", {"a", "s1", "F", "loud"}, {0.1, 3, 0});
  t.add_row("r,2", {"i", "s2", "M", "soft"}, {-1.0 / 3.0, 1e-300, 1});
  std::stringstream ss;
  write_feature_table(ss, t);
  const auto back = read_feature_table(ss);
  EXPECT_EQ(back.ids, t.ids);
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.labels, t.labels);
  EXPECT_EQ(columns_with_prefix(t, {"zeros."}).size(), 2u);
}

TEST(Dataset, DropsConstantColumns) {
  FeatureTable t;
  t.columns = {"x", "c", "y"};
  t.add_row("1", {"a", "s", "F", "c"}, {1, 5, 0});
  t.add_row("2", {"b", "s", "M", "c"}, {2, 5, 1});
  t.add_row("3", {"a", "s", "M", "c"}, {3, 5, 0});
  const auto d = drop_constant_features(make_dataset(t, t.columns, Problem::kVowel));
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(d.classes, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.y, (std::vector<int>{0, 1, 0}));
}

TEST(Stepwise, LeastImportantTieBreak) {
  EXPECT_EQ(least_important({0.5, 0.1, 0.1}, {"a", "z", "m"}), 2u);
}

TEST(Stepwise, TraceCoversEveryVariable) {
  const auto d = one_informative(120, 5, 1);
  ForestParams p;
  p.n_trees = 60;
  const auto trace = stepwise_select(d, p);
  EXPECT_EQ(trace.steps.size(), 6u);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) EXPECT_EQ(trace.steps[i].n_variables, 6 - i);
  const auto best = std::min_element(trace.steps.begin(), trace.steps.end(),
                                     [](const auto& a, const auto& b) { return a.oob < b.oob; });
  EXPECT_EQ(trace.best_oob, best->oob);
}

TEST(Stepwise, KeepsTheInformativeVariable) {
  ForestParams p;
  p.n_trees = 100;
  std::size_t kept = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    p.seed = seed;
    const auto trace = stepwise_select(one_informative(200, 9, 100 + seed), p);
    kept += std::count(trace.best_set.begin(), trace.best_set.end(), "signal");
  }
  EXPECT_GE(kept, 4u);
}

TEST(Stepwise, AllInformativeKeepsALargeSet) {
  // Each feature is an independent noisy copy of the label: more features, lower error.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset d;
  d.n_rows = 300;
  d.classes = {"a", "b"};
  for (int j = 0; j < 8; ++j) d.feature_names.push_back("f" + std::to_string(j));
  d.x.resize(8 * 300);
  for (std::size_t i = 0; i < 300; ++i) {
    d.y.push_back(static_cast<int>(i % 2));
    for (std::size_t j = 0; j < 8; ++j) d.x[j * 300 + i] = 0.6 * d.y.back() + g(rng);
  }
  ForestParams p;
  p.n_trees = 150;
  const auto trace = stepwise_select(d, p);
  EXPECT_GE(trace.best_set.size(), 4u);
}

TEST(Stepwise, TraceJsonRoundTrip) {
  StepwiseTrace t;
  t.steps = {{"x", 0.25, 2}, {"y", 0.125, 1}};
  t.best_set = {"y"};
  t.best_oob = 0.125;
  std::stringstream ss;
  write_trace_json(ss, t, {{"cell", "vowel.zeros.variables"}});
  std::map<std::string, std::string> meta;
  const auto back = read_trace_json(ss, &meta);
  EXPECT_EQ(meta.at("cell"), "vowel.zeros.variables");
  ASSERT_EQ(back.steps.size(), 2u);
  EXPECT_EQ(back.steps[1].removed, "y");
  EXPECT_EQ(back.best_set, t.best_set);
  EXPECT_EQ(back.best_oob, 0.125);
}

TEST(Counts, FamiliesCollapseIndices) {
  std::size_t g = 0;
  EXPECT_EQ(variable_family("zeros.H0.L3", &g), "H0.L_i");
  EXPECT_EQ(g, 5u);
  EXPECT_EQ(variable_family("takens.H1H2.proddiff2", &g), "H1H2.proddiff_i");
  EXPECT_EQ(g, 6u);
  EXPECT_EQ(variable_family("surface.H0.betti", &g), "H0.betti");
  EXPECT_EQ(g, 1u);
  EXPECT_EQ(variable_family("zeros.H0.betti.missing"), "");
  EXPECT_EQ(variable_family("mfcc.c3"), "");
}

TEST(Counts, FifteenOfTwentyFour) {
  std::vector<BestModel> models;
  int k = 0;
  for (auto problem : {Problem::kVowel, Problem::kGender, Problem::kSpeaker})
    for (const std::string repr : {"surface", "zeros", "takens", "all"})
      for (bool mfcc : {false, true}) {
        BestModel m{problem, repr, mfcc, {}};
        const std::string prefix = repr == "all" ? "zeros" : repr;
        if (k++ < 15) m.variables.push_back(prefix + ".H0.betti");
        m.variables.push_back(prefix + ".H0.max");
        models.push_back(m);
      }
  std::vector<std::string> warnings;
  const auto rows = count_best_model_variables(models, {"zeros.H1.entropy"}, &warnings);
  EXPECT_TRUE(warnings.empty());
  auto find = [&](const std::string& v) {
    return *std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.variable == v; });
  };
  const auto betti = find("H0.betti");
  EXPECT_EQ(betti.total, 15u);
  EXPECT_EQ(betti.total_max, 24u);
  EXPECT_DOUBLE_EQ(betti.percent(), 62.5);
  EXPECT_EQ(betti.per_representation_max.at("zeros"), 12u);
  EXPECT_EQ(find("H0.max").percent(), 100.0);
  EXPECT_EQ(find("H1.entropy").percent(), 0.0);

  models.pop_back();
  count_best_model_variables(models, {}, &warnings);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(Projection, LineHasNoSecondComponent) {
  Dataset d;
  d.n_rows = 50;
  d.classes = {"a"};
  d.feature_names = {"u", "v", "w"};
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 50; ++i) d.x.push_back((j + 1.0) * static_cast<double>(i) + j);
  d.y.assign(50, 0);
  std::vector<double> ev;
  const auto xy = project_2d(d, &ev);
  ASSERT_EQ(xy.size(), 100u);
  double var2 = 0;
  for (std::size_t i = 0; i < 50; ++i) var2 += xy[2 * i + 1] * xy[2 * i + 1];
  EXPECT_LT(var2 / 50, 1e-18);

  Dataset flat = d;
  std::fill(flat.x.begin(), flat.x.end(), 1.0);
  EXPECT_THROW(project_2d(flat), Error);
}
