#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "synth.hpp"
#include "topovox/cache.hpp"
#include "topovox/config.hpp"
#include "topovox/error.hpp"
#include "topovox/pipeline.hpp"

using namespace topovox;
namespace fs = std::filesystem;

namespace {

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("topovox_pipeline_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    recordings_ = synth::tone_corpus(3, 0.25, 7);
    config_ = default_config();
    config_.workers = 2;
    config_.forest.n_trees = 50;
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
  std::vector<Recording> recordings_;
  PipelineConfig config_;
};

}  // namespace

TEST(Config, ParseRenderRoundTrip) {
  const auto values = parse_config_text(
      "# comment\n[dataset]\nurl = \"http://x/y.zip\"\n[forest]\ntrees = 120\nseed = 9\n"
      "[representations]\ntakens = false\n[deviations]\numap = \"pca\"\n");
  const auto c = config_from_values(values);
  EXPECT_EQ(c.dataset_url, "http://x/y.zip");
  EXPECT_EQ(c.forest.n_trees, 120u);
  EXPECT_EQ(c.forest.seed, 9u);
  EXPECT_FALSE(c.takens);
  EXPECT_EQ(c.deviations.at("umap"), "pca");
  const auto again = config_from_values(parse_config_text(render_config(c)));
  EXPECT_EQ(render_config(again), render_config(c));
  EXPECT_EQ(enabled_representations(c), (std::vector<std::string>{"surface", "zeros"}));
}

TEST(Config, RejectsTyposAndBadSyntax) {
  EXPECT_THROW(config_from_values(parse_config_text("[forest]\ntress = 3\n")), Error);
  EXPECT_THROW(parse_config_text("[forest\n"), Error);
}

TEST(Cache, KeysSeparateStagesAndParams) {
  EXPECT_NE(Cache::key("abc", "surface", "p1"), Cache::key("abc", "surface", "p2"));
  EXPECT_NE(Cache::key("abc", "surface", "p1"), Cache::key("abc", "zeros", "p1"));
  EXPECT_EQ(Cache::key("abc", "surface", "p1"), Cache::key("abc", "surface", "p1"));
  const auto dir = fs::temp_directory_path() / "topovox_cache_unit";
  fs::remove_all(dir);
  Cache c(dir);
  EXPECT_FALSE(c.get("k").has_value());
  c.put(Cache::key("a", "b", "c"), "value\nwith lines");
  EXPECT_EQ(c.get(Cache::key("a", "b", "c")).value(), "value\nwith lines");
  fs::remove_all(dir);
}

TEST(Diagram, SerializationIsExact) {
  PersistenceDiagram d;
  d.points = {{0.1, 1.0 / 3.0, 0}, {0, std::numeric_limits<double>::infinity(), 0}, {2e-300, 5, 2}};
  d.min_value = 0;
  d.max_value = 5;
  const auto back = deserialize_diagram(serialize_diagram(d));
  ASSERT_EQ(back.points.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.points[i].birth, d.points[i].birth);
    EXPECT_EQ(back.points[i].death, d.points[i].death);
    EXPECT_EQ(back.points[i].dim, d.points[i].dim);
  }
  EXPECT_EQ(back.max_value, 5);
}

TEST(Cells, NamesAndValidation) {
  CellSpec m;
  m.with_mfcc = true;
  EXPECT_EQ(m.name(), "vowel.mfcc");
  CellSpec z;
  z.problem = Problem::kGender;
  z.representation = "zeros";
  z.with_mfcc = true;
  EXPECT_EQ(z.name(), "gender.zeros.variables.mfcc");
  CellSpec s;
  s.representation = "takens";
  s.vectorization = "image";
  s.dims = {1, 2};
  EXPECT_NO_THROW(s.validate());
  s.dims = {3};
  EXPECT_THROW(s.validate(), Error);
  s.representation = "all";
  s.dims = {};
  EXPECT_THROW(s.validate(), Error);
  CellSpec empty;
  EXPECT_THROW(empty.validate(), Error);
}

TEST_F(PipelineTest, FeaturizeIsDeterministicAndCached) {
  const auto corpus = corpus_from_recordings(recordings_);
  Cache cache(dir_ / "cache");
  std::ostringstream diagrams;
  const auto first = featurize_corpus(corpus, config_, &cache, &diagrams);
  EXPECT_TRUE(first.excluded.empty());
  EXPECT_EQ(first.variables.rows.size(), recordings_.size());
  EXPECT_EQ(first.computed_stages, 4 * recordings_.size());
  EXPECT_EQ(first.cached_stages, 0u);
  EXPECT_FALSE(diagrams.str().empty());

  const auto second = featurize_corpus(corpus, config_, &cache);
  EXPECT_EQ(second.computed_stages, 0u);
  EXPECT_EQ(second.cached_stages, 4 * recordings_.size());
  EXPECT_EQ(second.variables.rows, first.variables.rows);
  EXPECT_EQ(second.silhouettes.rows, first.silhouettes.rows);
  EXPECT_EQ(second.images.rows, first.images.rows);

  const auto uncached = featurize_corpus(corpus, config_, nullptr);
  EXPECT_EQ(uncached.variables.rows, first.variables.rows);
  EXPECT_EQ(uncached.images.rows, first.images.rows);
}

TEST_F(PipelineTest, SpectrogramChangeInvalidatesOnlyDependentStages) {
  const auto corpus = corpus_from_recordings(recordings_);
  Cache cache(dir_ / "cache");
  featurize_corpus(corpus, config_, &cache);
  auto changed = config_;
  changed.spectrogram.window_ms = 16.0;
  const auto r = featurize_corpus(corpus, changed, &cache);
  // surface, zeros and mfcc read the spectrogram; takens does not
  EXPECT_EQ(r.computed_stages, 3 * recordings_.size());
  EXPECT_EQ(r.cached_stages, recordings_.size());
}

TEST_F(PipelineTest, ShortRecordingIsExcludedNotDropped) {
  recordings_.push_back(synth::make_recording("tiny", std::vector<double>(50, 0.1), 16000.0,
                                              {"tone", "spk0", "female", "cond0"}));
  const auto r = featurize_corpus(corpus_from_recordings(recordings_), config_, nullptr);
  ASSERT_EQ(r.excluded.size(), 1u);
  EXPECT_EQ(r.excluded[0].first, "tiny");
  EXPECT_EQ(r.variables.rows.size(), recordings_.size() - 1);
}

TEST_F(PipelineTest, CellsAndTables) {
  const auto f = featurize_corpus(corpus_from_recordings(recordings_), config_, nullptr);
  CellSpec mfcc;
  mfcc.with_mfcc = true;
  const auto cols = cell_columns(f, mfcc);
  ASSERT_FALSE(cols.empty());
  for (const auto& c : cols) EXPECT_EQ(c.rfind("mfcc.", 0), 0u);

  CellSpec sil;
  sil.representation = "zeros";
  sil.vectorization = "silhouette";
  sil.dims = {1};
  for (const auto& c : cell_columns(f, sil)) EXPECT_EQ(c.rfind("zeros.H1.sil.", 0), 0u);

  ForestParams p = config_.forest;
  const auto result = run_forest_cell(f.variables, mfcc, p);
  EXPECT_EQ(result.n_rows, recordings_.size());
  EXPECT_GE(result.oob, 0.0);
  const auto back = parse_cell_result_json(cell_result_json(result));
  EXPECT_EQ(back.spec.name(), result.spec.name());
  EXPECT_EQ(back.oob, result.oob);

  const auto table = render_table1({result}, {{"projection", "pca"}}, "trees=50");
  std::istringstream in(table);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# deviations: projection=pca");
  std::getline(in, line);
  EXPECT_EQ(line, "# trees=50");
  std::getline(in, line);
  EXPECT_EQ(line, "representation,vectorization,vowel_oob_pct,gender_oob_pct,speaker_oob_pct");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("MFCC,MFCC,", 0), 0u);
  EXPECT_EQ(line.substr(line.size() - std::string(",—,—").size()), ",—,—");
  std::size_t rows = 0, dashed = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find(",—,—,—") != std::string::npos) ++dashed;
  }
  EXPECT_GT(rows, 10u);
  EXPECT_EQ(dashed, rows);
}
