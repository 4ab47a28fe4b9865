#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace topovox {

inline constexpr double kTargetSampleRate = 16000.0;

struct RecordingLabels {
  std::string vowel;
  std::string speaker;
  std::string gender;
  std::string condition;

  bool operator==(const RecordingLabels&) const = default;
};

/// A PCM recording. Channels are kept separate until to_mono().
struct Recording {
  std::string id;
  double sample_rate = 0.0;
  std::vector<std::vector<double>> channels;
  RecordingLabels labels;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_samples() const { return channels.empty() ? 0 : channels.front().size(); }
  /// Mono sample view; throws kUnsupportedFormat when more than one channel.
  std::span<const double> samples() const;
};

Recording load_wav(const std::filesystem::path& path);
Recording decode_wav(std::span<const std::uint8_t> bytes, std::string id = {});

/// 16-bit PCM RIFF writer; values are clipped to [-1, 32767/32768].
std::vector<std::uint8_t> encode_wav(const Recording& recording);
void save_wav(const Recording& recording, const std::filesystem::path& path);

Recording to_mono(const Recording& recording);

/// Kaiser-windowed sinc decimator, 64 taps in the source domain, cutoff at the
/// target Nyquist frequency. Taps are renormalized per output sample so a
/// constant input stays constant.
Recording resample(const Recording& recording, double target_rate = kTargetSampleRate);

/// load + to_mono + resample(16 kHz).
Recording load_preprocessed(const std::filesystem::path& path);

struct ManifestEntry {
  std::string id;
  std::filesystem::path path;
  RecordingLabels labels;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::string checksum;  // sha256 hex of the archive, empty for local scans
};

/// Parses labels out of a file name. Accepted layout (case-insensitive, any of
/// '_', '-', '.' or path separators between fields):
///   <speaker>_<gender>_<vowel>_<condition>[_<take>].wav
/// with gender in {f,m,female,male,w,h,femme,homme}. Returns nullopt when the
/// name does not fit.
std::optional<RecordingLabels> parse_labels_from_name(const std::filesystem::path& relative);

/// Builds a manifest from every .wav below root. A sidecar `labels.csv`
/// (columns file,vowel,speaker,gender,condition) takes precedence over the file
/// name convention. Files matching neither are skipped.
DatasetManifest scan_dataset(const std::filesystem::path& root);

void write_manifest_csv(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest_csv(const std::filesystem::path& path);

struct LabelMarginals {
  std::map<std::string, std::size_t> vowel;
  std::map<std::string, std::size_t> speaker;
  std::map<std::string, std::size_t> gender;
  std::map<std::string, std::size_t> condition;
};

LabelMarginals label_marginals(const DatasetManifest& manifest);

/// True when the label cardinalities of the full vowel corpus hold
/// (8 vowels, 20 speakers, 7 conditions, 2 genders).
bool has_full_cardinalities(const LabelMarginals& marginals);

}  // namespace topovox
