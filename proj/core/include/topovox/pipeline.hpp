#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "topovox/audio_io.hpp"
#include "topovox/cache.hpp"
#include "topovox/config.hpp"
#include "topovox/homology.hpp"
#include "topovox/learn.hpp"

namespace topovox {

/// surface, zeros, takens (fixed order).
const std::vector<std::string>& representation_names();
/// Homology dimensions used for a representation: {0,1,2} for takens, else {0,1}.
std::vector<int> homology_dims(const std::string& representation);
std::vector<std::string> enabled_representations(const PipelineConfig& config);

/// Diagram of one representation of a preprocessed (mono, 16 kHz) signal.
PersistenceDiagram representation_diagram(const std::string& representation, std::span<const double> signal,
                                          double sample_rate, const SpectrogramParams& params);

std::string serialize_diagram(const PersistenceDiagram& diagram);
PersistenceDiagram deserialize_diagram(const std::string& text);

struct StageStats {
  std::atomic<std::size_t> computed{0};
  std::atomic<std::size_t> cached{0};
};

/// A corpus member, either in memory or as a WAV file loaded on demand.
struct CorpusItem {
  std::string id;
  RecordingLabels labels;
  std::filesystem::path path;
  const Recording* recording = nullptr;
};

std::vector<CorpusItem> corpus_from_manifest(const DatasetManifest& manifest);
std::vector<CorpusItem> corpus_from_recordings(const std::vector<Recording>& recordings);

struct FeaturizeResult {
  FeatureTable variables;    // mfcc.* plus persistent variables of every enabled representation
  FeatureTable silhouettes;  // <repr>.H{p}.sil.<k>
  FeatureTable images;       // <repr>.H{p}.img.<row>.<col>
  std::vector<std::pair<std::string, std::string>> excluded;  // id, reason
  std::size_t computed_stages = 0;
  std::size_t cached_stages = 0;
};

/// Diagrams and MFCCs per recording (cached when `cache` is non-null), then
/// persistent variables and corpus-domain functional summaries. Recordings
/// with a failed stage are excluded and reported, never silently dropped.
/// When `diagrams_csv` is given every diagram is appended to it in corpus order.
FeaturizeResult featurize_corpus(const std::vector<CorpusItem>& corpus, const PipelineConfig& config, Cache* cache,
                                 std::ostream* diagrams_csv = nullptr);

/// One results cell: a problem, a representation (surface/zeros/takens/all,
/// or empty for MFCC alone), a vectorization and optional MFCC augmentation.
struct CellSpec {
  Problem problem = Problem::kVowel;
  std::string representation;
  std::string vectorization = "variables";  // variables, silhouette, image
  std::vector<int> dims;                    // empty = all dims of the representation
  bool with_mfcc = false;

  std::string name() const;
  void validate() const;
};

std::vector<std::string> cell_columns(const FeaturizeResult& features, const CellSpec& spec);
std::vector<std::string> cell_columns(const FeatureTable& table, const CellSpec& spec);

struct CellResult {
  CellSpec spec;
  std::string method;  // forest or stepwise
  double oob = 0.0;
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<std::string> variables;  // best set for stepwise, all features for forest
};

CellResult run_forest_cell(const FeatureTable& table, const CellSpec& spec, const ForestParams& params);
CellResult run_stepwise_cell(const FeatureTable& table, const CellSpec& spec, const ForestParams& params,
                             StepwiseTrace* trace = nullptr);

std::string cell_result_json(const CellResult& result);
CellResult parse_cell_result_json(const std::string& text);

/// table1.csv: OOB percentages per representation and vectorization. The first line is a comment listing deviations;
/// cells without a result are written as "—".
std::string render_table1(const std::vector<CellResult>& results, const std::map<std::string, std::string>& deviations,
                          const std::string& note = "");
std::string render_table2(const std::vector<VariableCount>& counts, const std::vector<std::string>& warnings);

}  // namespace topovox
