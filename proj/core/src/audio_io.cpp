#include "topovox/audio_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_map>

#include "topovox/csv.hpp"
#include "topovox/error.hpp"

namespace topovox {
namespace {

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

constexpr std::uint16_t kWaveFormatPcm = 1;
constexpr std::uint16_t kWaveFormatExtensible = 0xFFFE;

constexpr int kResampleHalfTaps = 32;
constexpr double kKaiserBeta = 8.6;

double kaiser(double u) {
  const double x = u / kResampleHalfTaps;
  if (std::abs(x) >= 1.0) return 0.0;
  static const double norm = std::cyl_bessel_i(0.0, kKaiserBeta);
  return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - x * x)) / norm;
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = M_PI * x;
  return std::sin(px) / px;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::optional<std::string> normalize_gender(const std::string& token) {
  const auto t = lower(token);
  if (t == "f" || t == "female" || t == "w" || t == "woman" || t == "femme") return "F";
  if (t == "m" || t == "male" || t == "h" || t == "man" || t == "homme") return "M";
  return std::nullopt;
}

std::string id_from_relative(const std::filesystem::path& relative) {
  auto stem = relative;
  stem.replace_extension();
  std::string id = stem.generic_string();
  std::replace(id.begin(), id.end(), '/', '_');
  return id;
}

}  // namespace

std::span<const double> Recording::samples() const {
  if (channels.size() != 1) {
    fail(ErrorCode::kUnsupportedFormat,
         "expected a mono recording, got " + std::to_string(channels.size()) + " channels");
  }
  return channels.front();
}

Recording decode_wav(std::span<const std::uint8_t> bytes, std::string id) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    fail(ErrorCode::kFormat, "missing RIFF/WAVE header");
  }
  std::size_t pos = 12;
  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint16_t block_align = 0;
  std::uint32_t rate = 0;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) {
      fail(ErrorCode::kFormat, "chunk extends past end of file (truncated)");
    }
    if (tag_is(bytes, pos, "fmt ")) {
      if (size < 16) fail(ErrorCode::kFormat, "fmt chunk too short");
      std::uint16_t format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      rate = read_u32(bytes, body + 4);
      block_align = read_u16(bytes, body + 12);
      bits = read_u16(bytes, body + 14);
      if (format == kWaveFormatExtensible) {
        if (size < 40) fail(ErrorCode::kFormat, "extensible fmt chunk too short");
        format = read_u16(bytes, body + 24);
      }
      if (format != kWaveFormatPcm) {
        fail(ErrorCode::kUnsupportedFormat, "only integer PCM is supported (format tag " +
                                                std::to_string(format) + ")");
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      data = bytes.subspan(body, size);
      have_data = true;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) fail(ErrorCode::kFormat, "missing fmt chunk");
  if (!have_data) fail(ErrorCode::kFormat, "missing data chunk");
  if (bits != 16) fail(ErrorCode::kUnsupportedFormat, std::to_string(bits) + "-bit PCM is not supported");
  if (channels == 0 || rate == 0) fail(ErrorCode::kFormat, "zero channels or sample rate");
  if (block_align != channels * 2) fail(ErrorCode::kFormat, "inconsistent block alignment");
  if (data.size() % block_align != 0) fail(ErrorCode::kFormat, "data chunk holds a partial frame");

  Recording rec;
  rec.id = std::move(id);
  rec.sample_rate = rate;
  const std::size_t frames = data.size() / block_align;
  rec.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < channels; ++c) {
      const auto raw = static_cast<std::int16_t>(read_u16(data, f * block_align + 2 * c));
      rec.channels[c][f] = raw / 32768.0;
    }
  }
  return rec;
}

Recording load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes, path.stem().string());
}

std::vector<std::uint8_t> encode_wav(const Recording& recording) {
  if (recording.channels.empty()) fail(ErrorCode::kEmptyInput, "no channels to encode");
  const auto channels = static_cast<std::uint16_t>(recording.channels.size());
  const std::size_t frames = recording.num_samples();
  const auto rate = static_cast<std::uint32_t>(std::lround(recording.sample_rate));
  const std::uint32_t data_size = static_cast<std::uint32_t>(frames * channels * 2);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kWaveFormatPcm);
  put_u16(out, channels);
  put_u32(out, rate);
  put_u32(out, rate * channels * 2);
  put_u16(out, static_cast<std::uint16_t>(channels * 2));
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (std::size_t f = 0; f < frames; ++f) {
    for (const auto& ch : recording.channels) {
      const double scaled = std::round(ch[f] * 32768.0);
      const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
      put_u16(out, static_cast<std::uint16_t>(v));
    }
  }
  return out;
}

void save_wav(const Recording& recording, const std::filesystem::path& path) {
  const auto bytes = encode_wav(recording);
  csv::write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Recording to_mono(const Recording& recording) {
  if (recording.channels.empty()) fail(ErrorCode::kEmptyInput, "recording has no channels");
  if (recording.channels.size() > 2) {
    fail(ErrorCode::kUnsupportedFormat,
         std::to_string(recording.channels.size()) + " channels; only mono or stereo is supported");
  }
  if (recording.channels.size() == 1) return recording;
  Recording out = recording;
  const auto& left = recording.channels[0];
  const auto& right = recording.channels[1];
  std::vector<double> mono(left.size());
  for (std::size_t i = 0; i < mono.size(); ++i) mono[i] = 0.5 * (left[i] + right[i]);
  out.channels.assign(1, std::move(mono));
  return out;
}

Recording resample(const Recording& recording, double target_rate) {
  if (recording.num_samples() == 0) fail(ErrorCode::kEmptyInput, "cannot resample an empty recording");
  if (!(target_rate > 0.0)) fail(ErrorCode::kInvalidParameter, "target rate must be positive");
  if (target_rate > recording.sample_rate) {
    fail(ErrorCode::kUnsupportedFormat, "upsampling is not supported");
  }
  if (target_rate == recording.sample_rate) return recording;

  const double ratio = target_rate / recording.sample_rate;
  const std::size_t n_in = recording.num_samples();
  const auto n_out = static_cast<std::size_t>(std::llround(static_cast<double>(n_in) * ratio));

  Recording out = recording;
  out.sample_rate = target_rate;
  for (auto& ch : out.channels) ch.assign(n_out, 0.0);

  std::vector<double> taps(2 * kResampleHalfTaps);
  for (std::size_t n = 0; n < n_out; ++n) {
    const double center = static_cast<double>(n) / ratio;
    const auto base = static_cast<long>(std::floor(center));
    const long first = base - kResampleHalfTaps + 1;
    double weight_sum = 0.0;
    for (int k = 0; k < 2 * kResampleHalfTaps; ++k) {
      const long idx = first + k;
      if (idx < 0 || idx >= static_cast<long>(n_in)) {
        taps[k] = 0.0;
        continue;
      }
      const double u = center - static_cast<double>(idx);
      taps[k] = sinc(ratio * u) * kaiser(u);
      weight_sum += taps[k];
    }
    for (std::size_t c = 0; c < recording.channels.size(); ++c) {
      const auto& src = recording.channels[c];
      double acc = 0.0;
      for (int k = 0; k < 2 * kResampleHalfTaps; ++k) {
        const long idx = first + k;
        if (taps[k] != 0.0) acc += taps[k] * src[static_cast<std::size_t>(idx)];
      }
      out.channels[c][n] = weight_sum != 0.0 ? acc / weight_sum : 0.0;
    }
  }
  return out;
}

Recording load_preprocessed(const std::filesystem::path& path) {
  return resample(to_mono(load_wav(path)), kTargetSampleRate);
}

std::optional<RecordingLabels> parse_labels_from_name(const std::filesystem::path& relative) {
  const std::string text = relative.stem().string();
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (c == '_' || c == '-' || c == '.' || c == '/' || c == ' ') {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  if (tokens.size() < 4) return std::nullopt;
  auto gender = normalize_gender(tokens[1]);
  if (!gender) return std::nullopt;
  return RecordingLabels{lower(tokens[2]), tokens[0], *gender, lower(tokens[3])};
}

DatasetManifest scan_dataset(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) fail(ErrorCode::kIo, "not a directory: " + root.string());

  std::unordered_map<std::string, RecordingLabels> sidecar;
  const auto sidecar_path = root / "labels.csv";
  if (fs::exists(sidecar_path)) {
    const auto rows = csv::read_file(sidecar_path);
    if (!rows.empty()) {
      const auto& header = rows.front();
      const auto c_file = csv::column(header, "file");
      const auto c_vowel = csv::column(header, "vowel");
      const auto c_speaker = csv::column(header, "speaker");
      const auto c_gender = csv::column(header, "gender");
      const auto c_condition = csv::column(header, "condition");
      for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() < header.size()) continue;
        auto gender = normalize_gender(row[c_gender]).value_or(row[c_gender]);
        sidecar[fs::path(row[c_file]).generic_string()] =
            RecordingLabels{lower(row[c_vowel]), row[c_speaker], gender, lower(row[c_condition])};
      }
    }
  }

  std::vector<fs::path> files;
  for (const auto& item : fs::recursive_directory_iterator(root)) {
    if (!item.is_regular_file()) continue;
    if (lower(item.path().extension().string()) != ".wav") continue;
    files.push_back(fs::relative(item.path(), root));
  }
  std::sort(files.begin(), files.end());

  DatasetManifest manifest;
  for (const auto& rel : files) {
    std::optional<RecordingLabels> labels;
    if (auto it = sidecar.find(rel.generic_string()); it != sidecar.end()) {
      labels = it->second;
    } else {
      labels = parse_labels_from_name(rel);
    }
    if (!labels) continue;
    manifest.entries.push_back({id_from_relative(rel), root / rel, *labels});
  }
  return manifest;
}

void write_manifest_csv(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ostringstream out;
  csv::write_row(out, {"id", "path", "vowel", "speaker", "gender", "condition"});
  for (const auto& e : manifest.entries) {
    csv::write_row(out, {e.id, e.path.generic_string(), e.labels.vowel, e.labels.speaker, e.labels.gender,
                         e.labels.condition});
  }
  csv::write_file_atomic(path, out.str());
}

DatasetManifest read_manifest_csv(const std::filesystem::path& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) fail(ErrorCode::kFormat, "empty manifest " + path.string());
  const auto& header = rows.front();
  const auto c_id = csv::column(header, "id");
  const auto c_path = csv::column(header, "path");
  const auto c_vowel = csv::column(header, "vowel");
  const auto c_speaker = csv::column(header, "speaker");
  const auto c_gender = csv::column(header, "gender");
  const auto c_condition = csv::column(header, "condition");
  DatasetManifest manifest;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() < header.size()) fail(ErrorCode::kFormat, "short manifest row " + std::to_string(r));
    manifest.entries.push_back(
        {row[c_id], row[c_path], RecordingLabels{row[c_vowel], row[c_speaker], row[c_gender], row[c_condition]}});
  }
  return manifest;
}

LabelMarginals label_marginals(const DatasetManifest& manifest) {
  LabelMarginals m;
  for (const auto& e : manifest.entries) {
    ++m.vowel[e.labels.vowel];
    ++m.speaker[e.labels.speaker];
    ++m.gender[e.labels.gender];
    ++m.condition[e.labels.condition];
  }
  return m;
}

bool has_full_cardinalities(const LabelMarginals& m) {
  return m.vowel.size() == 8 && m.speaker.size() == 20 && m.condition.size() == 7 && m.gender.size() == 2;
}

}  // namespace topovox
