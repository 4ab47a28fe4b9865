#include "topovox/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "topovox/csv.hpp"
#include "topovox/error.hpp"

namespace topovox {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

double as_double(const ConfigValues& v, const std::string& key) {
  try {
    return csv::parse_double(v.at(key));
  } catch (const Error&) {
    fail(ErrorCode::kInvalidParameter, "config key " + key + " expects a number, got '" + v.at(key) + "'");
  }
}

std::size_t as_size(const ConfigValues& v, const std::string& key) {
  const std::string& text = v.at(key);
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorCode::kInvalidParameter, "config key " + key + " expects a non-negative integer, got '" + text + "'");
  }
  return out;
}

bool as_bool(const ConfigValues& v, const std::string& key) {
  const std::string& text = v.at(key);
  if (text == "true") return true;
  if (text == "false") return false;
  fail(ErrorCode::kInvalidParameter, "config key " + key + " expects true or false, got '" + text + "'");
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) { return csv::format_double(v); }

}  // namespace

ConfigValues parse_config_text(const std::string& text) {
  ConfigValues values;
  std::istringstream in(text);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) {
        fail(ErrorCode::kFormat, "config line " + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kFormat, "config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key.empty()) fail(ErrorCode::kFormat, "config line " + std::to_string(line_no) + ": empty key");
    if (!value.empty() && value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') {
        fail(ErrorCode::kFormat, "config line " + std::to_string(line_no) + ": unterminated string");
      }
      std::string unq;
      for (std::size_t i = 1; i + 1 < value.size(); ++i) {
        if (value[i] == '\\' && i + 2 < value.size()) ++i;
        unq += value[i];
      }
      value = unq;
    }
    values[section.empty() ? key : section + "." + key] = value;
  }
  return values;
}

PipelineConfig default_config() {
  PipelineConfig c;
  c.dataset_url = "zenodo:7961904";
  c.deviations["projection"] = "PCA on standardized features replaces UMAP for 2D projections";
  return c;
}

PipelineConfig config_from_values(const ConfigValues& values, const std::filesystem::path& base_dir) {
  PipelineConfig c = default_config();
  static const std::set<std::string> known = {
      "dataset.url", "dataset.sha256", "dataset.dir", "output.dir", "output.cache", "output.workers",
      "representations.surface", "representations.zeros", "representations.takens", "spectrogram.window_ms",
      "spectrogram.overlap", "vectorize.alpha", "vectorize.ratio", "vectorize.gamma", "vectorize.nsample",
      "vectorize.resolution", "mfcc.n_filters", "mfcc.f_min", "mfcc.f_max", "mfcc.n_coeffs", "forest.trees",
      "forest.seed", "forest.mtry", "forest.threads"};
  for (const auto& [key, value] : values) {
    if (key.rfind("deviations.", 0) == 0) {
      c.deviations[key.substr(11)] = value;
      continue;
    }
    if (!known.count(key)) fail(ErrorCode::kInvalidParameter, "unknown config key " + key);
  }
  auto path_of = [&](const std::string& text) {
    std::filesystem::path p(text);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  auto has = [&](const std::string& k) { return values.count(k) != 0; };
  if (has("dataset.url")) c.dataset_url = values.at("dataset.url");
  if (has("dataset.sha256")) c.dataset_sha256 = values.at("dataset.sha256");
  if (has("dataset.dir")) c.dataset_dir = path_of(values.at("dataset.dir"));
  if (has("output.dir")) c.output_dir = path_of(values.at("output.dir"));
  if (has("output.cache")) c.cache_dir = path_of(values.at("output.cache"));
  if (has("output.workers")) c.workers = as_size(values, "output.workers");
  if (has("representations.surface")) c.surface = as_bool(values, "representations.surface");
  if (has("representations.zeros")) c.zeros = as_bool(values, "representations.zeros");
  if (has("representations.takens")) c.takens = as_bool(values, "representations.takens");
  if (has("spectrogram.window_ms")) c.spectrogram.window_ms = as_double(values, "spectrogram.window_ms");
  if (has("spectrogram.overlap")) c.spectrogram.overlap = as_double(values, "spectrogram.overlap");
  if (has("vectorize.alpha")) c.vectorize.alpha = as_double(values, "vectorize.alpha");
  if (has("vectorize.ratio")) c.vectorize.ratio = as_double(values, "vectorize.ratio");
  if (has("vectorize.gamma")) c.vectorize.gamma = as_double(values, "vectorize.gamma");
  if (has("vectorize.nsample")) c.vectorize.nsample = as_size(values, "vectorize.nsample");
  if (has("vectorize.resolution")) c.vectorize.resolution = as_size(values, "vectorize.resolution");
  if (has("mfcc.n_filters")) c.mfcc.n_filters = as_size(values, "mfcc.n_filters");
  if (has("mfcc.f_min")) c.mfcc.f_min = as_double(values, "mfcc.f_min");
  if (has("mfcc.f_max")) c.mfcc.f_max = as_double(values, "mfcc.f_max");
  if (has("mfcc.n_coeffs")) c.mfcc.n_coeffs = as_size(values, "mfcc.n_coeffs");
  if (has("forest.trees")) c.forest.n_trees = as_size(values, "forest.trees");
  if (has("forest.seed")) c.forest.seed = as_size(values, "forest.seed");
  if (has("forest.mtry")) c.forest.mtry = as_size(values, "forest.mtry");
  if (has("forest.threads")) c.forest.threads = as_size(values, "forest.threads");

  if (!(c.spectrogram.window_ms > 0.0)) fail(ErrorCode::kInvalidParameter, "spectrogram.window_ms must be positive");
  if (!(c.spectrogram.overlap >= 0.0 && c.spectrogram.overlap < 1.0)) {
    fail(ErrorCode::kInvalidParameter, "spectrogram.overlap must be in [0, 1)");
  }
  if (c.vectorize.nsample == 0 || c.vectorize.resolution == 0) {
    fail(ErrorCode::kInvalidParameter, "vectorize.nsample and vectorize.resolution must be positive");
  }
  if (c.forest.n_trees == 0) fail(ErrorCode::kInvalidParameter, "forest.trees must be positive");
  if (!c.surface && !c.zeros && !c.takens) fail(ErrorCode::kInvalidParameter, "all representations are disabled");
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kInvalidParameter, "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_values(parse_config_text(buf.str()), path.parent_path());
}

std::string render_config(const PipelineConfig& c) {
  std::ostringstream out;
  out << "[dataset]\n"
      << "url = " << quote(c.dataset_url) << "\n"
      << "sha256 = " << quote(c.dataset_sha256) << "\n"
      << "dir = " << quote(c.dataset_dir.string()) << "\n\n"
      << "[output]\n"
      << "dir = " << quote(c.output_dir.string()) << "\n"
      << "cache = " << quote(c.cache_path().string()) << "\n"
      << "workers = " << c.workers << "\n\n"
      << "[representations]\n"
      << "surface = " << (c.surface ? "true" : "false") << "\n"
      << "zeros = " << (c.zeros ? "true" : "false") << "\n"
      << "takens = " << (c.takens ? "true" : "false") << "\n\n"
      << "[spectrogram]\n"
      << "window_ms = " << num(c.spectrogram.window_ms) << "\n"
      << "overlap = " << num(c.spectrogram.overlap) << "\n\n"
      << "[vectorize]\n"
      << "alpha = " << num(c.vectorize.alpha) << "\n"
      << "ratio = " << num(c.vectorize.ratio) << "\n"
      << "gamma = " << num(c.vectorize.gamma) << "\n"
      << "nsample = " << c.vectorize.nsample << "\n"
      << "resolution = " << c.vectorize.resolution << "\n\n"
      << "[mfcc]\n"
      << "n_filters = " << c.mfcc.n_filters << "\n"
      << "f_min = " << num(c.mfcc.f_min) << "\n"
      << "f_max = " << num(c.mfcc.f_max) << "\n"
      << "n_coeffs = " << c.mfcc.n_coeffs << "\n\n"
      << "[forest]\n"
      << "trees = " << c.forest.n_trees << "\n"
      << "seed = " << c.forest.seed << "\n"
      << "mtry = " << c.forest.mtry << "\n"
      << "threads = " << c.forest.threads << "\n\n"
      << "[deviations]\n";
  for (const auto& [k, v] : c.deviations) out << k << " = " << quote(v) << "\n";
  return out.str();
}

std::string spectrogram_fingerprint(const PipelineConfig& c) {
  return "window_ms=" + num(c.spectrogram.window_ms) + ";overlap=" + num(c.spectrogram.overlap);
}

std::string mfcc_fingerprint(const PipelineConfig& c) {
  return spectrogram_fingerprint(c) + ";filters=" + std::to_string(c.mfcc.n_filters) + ";fmin=" + num(c.mfcc.f_min) +
         ";fmax=" + num(c.mfcc.f_max) + ";coeffs=" + std::to_string(c.mfcc.n_coeffs);
}

}  // namespace topovox
