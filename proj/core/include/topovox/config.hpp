#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>

#include "topovox/forest.hpp"
#include "topovox/mfcc.hpp"
#include "topovox/representations.hpp"
#include "topovox/vectorize.hpp"

namespace topovox {

/// Flat view of a TOML-style document: "section.key" -> raw value text
/// (quotes removed from strings).
using ConfigValues = std::map<std::string, std::string>;

/// Supports [section] headers, key = value pairs, "strings", numbers,
/// true/false and # comments. Throws kFormat with the line number.
ConfigValues parse_config_text(const std::string& text);

struct PipelineConfig {
  // [dataset]
  std::string dataset_url;
  std::string dataset_sha256;
  std::filesystem::path dataset_dir = "data";  // where fetch unpacks, or an existing corpus
  // [output]
  std::filesystem::path output_dir = "out";
  std::filesystem::path cache_dir;  // empty = <output_dir>/cache
  std::size_t workers = 0;          // 0 = hardware concurrency
  // [representations]
  bool surface = true;
  bool zeros = true;
  bool takens = true;

  SpectrogramParams spectrogram;
  VectorizeParams vectorize;
  MfccParams mfcc;
  ForestParams forest;

  /// Departures from the reference method, echoed into every report.
  std::map<std::string, std::string> deviations;

  std::filesystem::path cache_path() const { return cache_dir.empty() ? output_dir / "cache" : cache_dir; }
};

PipelineConfig default_config();
/// Unknown sections or keys raise kInvalidParameter so typos do not pass silently.
PipelineConfig config_from_values(const ConfigValues& values, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
/// Canonical TOML-style rendering, including the [deviations] section.
std::string render_config(const PipelineConfig& config);

/// Parameter strings that feed the cache keys of each stage.
std::string spectrogram_fingerprint(const PipelineConfig& config);
std::string mfcc_fingerprint(const PipelineConfig& config);

}  // namespace topovox
