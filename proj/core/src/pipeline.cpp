#include "topovox/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "topovox/csv.hpp"
#include "topovox/error.hpp"
#include "topovox/fetch.hpp"
#include "topovox/mfcc.hpp"
#include "topovox/representations.hpp"
#include "topovox/vectorize.hpp"

namespace topovox {
namespace {

// Bumped whenever a stage's output changes for identical inputs.
constexpr const char* kStageVersion = "v1";

std::string dims_tag(const std::vector<int>& dims) {
  std::string s = "p";
  for (int d : dims) s += std::to_string(d);
  return s;
}

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs fn(i) for i in [begin, end) on `workers` threads; the first exception
// is rethrown after every thread has joined.
template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, std::size_t workers, Fn&& fn) {
  if (begin >= end) return;
  workers = worker_count(workers, end - begin);
  if (workers == 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= end) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = end;
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

std::string samples_hash(const Recording& rec) {
  std::string material = "rate=" + csv::format_double(rec.sample_rate) + ";";
  for (const auto& ch : rec.channels) {
    material.append(reinterpret_cast<const char*>(ch.data()), ch.size() * sizeof(double));
    material += '|';
  }
  return sha256_hex({reinterpret_cast<const std::uint8_t*>(material.data()), material.size()});
}

Recording preprocess(const Recording& rec) {
  Recording mono = rec.num_channels() == 1 ? rec : to_mono(rec);
  if (mono.sample_rate != kTargetSampleRate) mono = resample(mono, kTargetSampleRate);
  return mono;
}

std::string stage_params(const std::string& stage, const PipelineConfig& config) {
  std::string p = std::string(kStageVersion) + ";preprocess=16k-mono;";
  if (stage == "takens") return p;
  if (stage == "mfcc") return p + mfcc_fingerprint(config);
  return p + spectrogram_fingerprint(config);
}

// Either a diagram/vector payload or the reason the stage failed.
struct StageOutcome {
  std::optional<PersistenceDiagram> diagram;
  std::vector<double> mfcc;
  std::string failure;
};

std::string serialize_failure(const std::string& reason) { return "failed\n" + reason; }

std::string serialize_vector(const std::vector<double>& v) {
  std::string out = "topovox-vector " + std::to_string(v.size()) + "\n";
  for (double x : v) out += csv::format_double(x) + "\n";
  return out;
}

std::vector<double> deserialize_vector(const std::string& text) {
  std::istringstream in(text);
  std::string tag, line;
  std::size_t n = 0;
  if (!(in >> tag >> n) || tag != "topovox-vector") fail(ErrorCode::kFormat, "bad cached vector");
  std::getline(in, line);
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) fail(ErrorCode::kFormat, "truncated cached vector");
    v.push_back(csv::parse_double(line));
  }
  return v;
}

struct ItemState {
  bool failed = false;
  std::string failure;
  std::vector<double> features;
  std::map<std::string, PersistenceDiagram> diagrams;  // kept only without a cache
  std::map<std::string, ImageDomain> domains;          // "<repr>.H<p>"
  std::map<std::string, std::pair<double, double>> spans;  // min birth, max death
};

std::vector<std::string> mfcc_names(const MfccParams& params) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < params.n_coeffs; ++i) names.push_back("mfcc." + std::to_string(i));
  return names;
}

class RecordingWorker {
 public:
  RecordingWorker(const CorpusItem& item, const PipelineConfig& config, Cache* cache, StageStats& stats)
      : item_(item), config_(config), cache_(cache), stats_(stats) {}

  const std::string& content_hash() {
    if (hash_.empty()) hash_ = item_.recording != nullptr ? samples_hash(*item_.recording) : sha256_file(item_.path);
    return hash_;
  }

  StageOutcome diagram(const std::string& repr) {
    return run_stage(repr, [&]() {
      StageOutcome out;
      out.diagram = repr == "takens" ? representation_diagram(repr, signal().samples(), kTargetSampleRate,
                                                              config_.spectrogram)
                                     : surface_diagram(repr);
      return out;
    });
  }

  StageOutcome mfcc() {
    return run_stage("mfcc", [&]() {
      StageOutcome out;
      out.mfcc = aggregate_mfcc(surface(), kTargetSampleRate, config_.mfcc);
      return out;
    });
  }

 private:
  template <class Compute>
  StageOutcome run_stage(const std::string& stage, Compute&& compute) {
    std::string key;
    if (cache_ != nullptr) {
      key = Cache::key(content_hash(), stage, stage_params(stage, config_));
      if (auto hit = cache_->get(key)) {
        ++stats_.cached;
        return decode(stage, *hit);
      }
    }
    StageOutcome out;
    try {
      out = compute();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInvalidFiltration || e.code() == ErrorCode::kIo) throw;
      out.failure = stage + ": " + std::string(to_string(e.code())) + ": " + e.what();
    }
    ++stats_.computed;
    if (cache_ != nullptr) {
      if (!out.failure.empty())
        cache_->put(key, serialize_failure(out.failure));
      else if (out.diagram)
        cache_->put(key, serialize_diagram(*out.diagram));
      else
        cache_->put(key, serialize_vector(out.mfcc));
    }
    return out;
  }

  static StageOutcome decode(const std::string& stage, const std::string& text) {
    StageOutcome out;
    if (text.rfind("failed\n", 0) == 0)
      out.failure = text.substr(7);
    else if (stage == "mfcc")
      out.mfcc = deserialize_vector(text);
    else
      out.diagram = deserialize_diagram(text);
    return out;
  }

  const Recording& signal() {
    if (!signal_) {
      if (item_.recording != nullptr)
        signal_ = preprocess(*item_.recording);
      else
        signal_ = load_preprocessed(item_.path);
    }
    return *signal_;
  }

  const SpectrogramSurface& surface() {
    if (!surface_) surface_ = spectrogram(signal().samples(), kTargetSampleRate, config_.spectrogram);
    return *surface_;
  }

  PersistenceDiagram surface_diagram(const std::string& repr) {
    if (repr == "surface") return compute_persistence(cubical_sublevel_filtration(surface()));
    return compute_persistence(alpha_filtration(extract_zeros(surface())));
  }

  const CorpusItem& item_;
  const PipelineConfig& config_;
  Cache* cache_;
  StageStats& stats_;
  std::string hash_;
  std::optional<Recording> signal_;
  std::optional<SpectrogramSurface> surface_;
};

std::string domain_key(const std::string& repr, int p) { return repr + ".H" + std::to_string(p); }

}  // namespace

const std::vector<std::string>& representation_names() {
  static const std::vector<std::string> names = {"surface", "zeros", "takens"};
  return names;
}

std::vector<int> homology_dims(const std::string& representation) {
  if (representation == "takens") return {0, 1, 2};
  if (representation == "surface" || representation == "zeros") return {0, 1};
  fail(ErrorCode::kInvalidParameter, "unknown representation '" + representation + "'");
}

std::vector<std::string> enabled_representations(const PipelineConfig& config) {
  std::vector<std::string> out;
  if (config.surface) out.push_back("surface");
  if (config.zeros) out.push_back("zeros");
  if (config.takens) out.push_back("takens");
  return out;
}

PersistenceDiagram representation_diagram(const std::string& representation, std::span<const double> signal,
                                          double sample_rate, const SpectrogramParams& params) {
  if (representation == "takens") return compute_persistence(alpha_filtration(takens_representation(signal).cloud));
  const auto surface = spectrogram(signal, sample_rate, params);
  if (representation == "surface") return compute_persistence(cubical_sublevel_filtration(surface));
  if (representation == "zeros") return compute_persistence(alpha_filtration(extract_zeros(surface)));
  fail(ErrorCode::kInvalidParameter, "unknown representation '" + representation + "'");
}

std::string serialize_diagram(const PersistenceDiagram& diagram) {
  std::string out = "topovox-diagram " + csv::format_double(diagram.min_value) + " " +
                    csv::format_double(diagram.max_value) + " " + std::to_string(diagram.points.size()) + "\n";
  for (const auto& q : diagram.points)
    out += std::to_string(q.dim) + " " + csv::format_double(q.birth) + " " + csv::format_double(q.death) + "\n";
  return out;
}

PersistenceDiagram deserialize_diagram(const std::string& text) {
  std::istringstream in(text);
  std::string tag, lo, hi;
  std::size_t n = 0;
  if (!(in >> tag >> lo >> hi >> n) || tag != "topovox-diagram") fail(ErrorCode::kFormat, "bad serialized diagram");
  PersistenceDiagram d;
  d.min_value = csv::parse_double(lo);
  d.max_value = csv::parse_double(hi);
  d.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PersistencePair q;
    std::string b, e;
    if (!(in >> q.dim >> b >> e)) fail(ErrorCode::kFormat, "truncated serialized diagram");
    q.birth = csv::parse_double(b);
    q.death = csv::parse_double(e);
    d.points.push_back(q);
  }
  return d;
}

std::vector<CorpusItem> corpus_from_manifest(const DatasetManifest& manifest) {
  std::vector<CorpusItem> out;
  for (const auto& e : manifest.entries) out.push_back({e.id, e.labels, e.path, nullptr});
  return out;
}

std::vector<CorpusItem> corpus_from_recordings(const std::vector<Recording>& recordings) {
  std::vector<CorpusItem> out;
  for (const auto& r : recordings) out.push_back({r.id, r.labels, {}, &r});
  return out;
}

FeaturizeResult featurize_corpus(const std::vector<CorpusItem>& corpus, const PipelineConfig& config, Cache* cache,
                                 std::ostream* diagrams_csv) {
  if (corpus.empty()) fail(ErrorCode::kEmptyInput, "no recordings to featurize");
  std::set<std::string> seen;
  for (const auto& item : corpus) {
    if (!seen.insert(item.id).second) fail(ErrorCode::kInvalidParameter, "duplicate recording id '" + item.id + "'");
  }
  const auto reprs = enabled_representations(config);

  std::vector<std::string> names = mfcc_names(config.mfcc);
  for (const auto& repr : reprs) {
    const auto block = persistent_variables(PersistenceDiagram{}, homology_dims(repr), repr, config.vectorize);
    names.insert(names.end(), block.names.begin(), block.names.end());
  }

  StageStats stats, reload_stats;
  std::vector<ItemState> states(corpus.size());
  parallel_for(0, corpus.size(), config.workers, [&](std::size_t i) {
    RecordingWorker worker(corpus[i], config, cache, stats);
    ItemState& st = states[i];
    const auto m = worker.mfcc();
    if (!m.failure.empty()) {
      st.failed = true;
      st.failure = m.failure;
    } else if (m.mfcc.size() != config.mfcc.n_coeffs) {
      fail(ErrorCode::kFormat, "cached mfcc has the wrong length");
    }
    std::vector<double> values = m.mfcc;
    FeatureVector fv;
    for (const auto& repr : reprs) {
      auto out = worker.diagram(repr);
      if (!out.failure.empty()) {
        if (!st.failed) st.failure = out.failure;
        st.failed = true;
        continue;
      }
      const auto& d = *out.diagram;
      fv.append(persistent_variables(d, homology_dims(repr), repr, config.vectorize));
      for (int p : homology_dims(repr)) {
        const auto points = d.capped(p);
        auto dom = ImageDomain::empty();
        dom.include(points);
        std::pair<double, double> span{INFINITY, -INFINITY};
        for (const auto& q : points) {
          span.first = std::min(span.first, q.birth);
          span.second = std::max(span.second, q.death);
        }
        st.domains[domain_key(repr, p)] = dom;
        st.spans[domain_key(repr, p)] = span;
      }
      if (cache == nullptr) st.diagrams.emplace(repr, std::move(*out.diagram));
    }
    if (st.failed) return;
    const std::size_t offset = values.size();
    if (offset + fv.names.size() != names.size()) fail(ErrorCode::kFormat, "feature layout is incomplete");
    for (std::size_t j = 0; j < fv.names.size(); ++j) {
      if (fv.names[j] != names[offset + j]) fail(ErrorCode::kFormat, "feature layout mismatch at '" + fv.names[j] + "'");
    }
    values.insert(values.end(), fv.values.begin(), fv.values.end());
    st.features = std::move(values);
  });

  FeaturizeResult result;
  result.variables.columns = names;

  // corpus-wide domains over the rows that are kept
  std::map<std::string, ImageDomain> domains;
  std::map<std::string, std::pair<double, double>> spans;
  for (const auto& repr : reprs) {
    for (int p : homology_dims(repr)) {
      domains[domain_key(repr, p)] = ImageDomain::empty();
      spans[domain_key(repr, p)] = {INFINITY, -INFINITY};
    }
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& st = states[i];
    if (st.failed) {
      result.excluded.emplace_back(corpus[i].id, st.failure);
      continue;
    }
    result.variables.add_row(corpus[i].id, corpus[i].labels, st.features);
    for (const auto& [key, dom] : st.domains) {
      auto& g = domains[key];
      g.x_min = std::min(g.x_min, dom.x_min);
      g.x_max = std::max(g.x_max, dom.x_max);
      g.y_min = std::min(g.y_min, dom.y_min);
      g.y_max = std::max(g.y_max, dom.y_max);
    }
    for (const auto& [key, span] : st.spans) {
      spans[key].first = std::min(spans[key].first, span.first);
      spans[key].second = std::max(spans[key].second, span.second);
    }
  }
  for (auto& [key, span] : spans) {
    if (!std::isfinite(span.first)) span = {0.0, 0.0};
  }

  for (const auto& repr : reprs) {
    for (int p : homology_dims(repr)) {
      const auto key = domain_key(repr, p);
      for (std::size_t k = 0; k < config.vectorize.nsample; ++k)
        result.silhouettes.columns.push_back(key + ".sil." + std::to_string(k));
      for (std::size_t r = 0; r < config.vectorize.resolution; ++r) {
        for (std::size_t c = 0; c < config.vectorize.resolution; ++c)
          result.images.columns.push_back(key + ".img." + std::to_string(r) + "." + std::to_string(c));
      }
    }
  }

  if (diagrams_csv != nullptr) write_diagram_csv_header(*diagrams_csv);
  // Second pass in ordered batches so diagrams.csv keeps corpus order without
  // holding every diagram of a large corpus at once.
  const std::size_t batch = 8 * worker_count(config.workers, corpus.size());
  for (std::size_t start = 0; start < corpus.size(); start += batch) {
    const std::size_t stop = std::min(corpus.size(), start + batch);
    std::vector<std::map<std::string, PersistenceDiagram>> loaded(stop - start);
    std::vector<std::vector<double>> sil_rows(stop - start), img_rows(stop - start);
    parallel_for(start, stop, config.workers, [&](std::size_t i) {
      auto& diagrams = loaded[i - start];
      if (cache == nullptr) {
        diagrams = std::move(states[i].diagrams);
      } else {
        RecordingWorker worker(corpus[i], config, cache, reload_stats);
        for (const auto& repr : reprs) {
          auto out = worker.diagram(repr);
          if (out.diagram) diagrams.emplace(repr, std::move(*out.diagram));
        }
      }
      if (states[i].failed) return;
      auto& sil = sil_rows[i - start];
      auto& img = img_rows[i - start];
      for (const auto& repr : reprs) {
        const auto& d = diagrams.at(repr);
        for (int p : homology_dims(repr)) {
          const auto key = domain_key(repr, p);
          const auto points = d.capped(p);
          const auto s = silhouette(points, spans[key].first, spans[key].second, config.vectorize.gamma,
                                    config.vectorize.nsample);
          sil.insert(sil.end(), s.samples.begin(), s.samples.end());
          const auto im = persistence_image(points, domains.at(key), config.vectorize.resolution);
          img.insert(img.end(), im.pixels.begin(), im.pixels.end());
        }
      }
    });
    for (std::size_t i = start; i < stop; ++i) {
      if (diagrams_csv != nullptr) {
        for (const auto& repr : reprs) {
          auto it = loaded[i - start].find(repr);
          if (it != loaded[i - start].end()) write_diagram_csv(*diagrams_csv, corpus[i].id, repr, it->second);
        }
      }
      if (states[i].failed) continue;
      result.silhouettes.add_row(corpus[i].id, corpus[i].labels, sil_rows[i - start]);
      result.images.add_row(corpus[i].id, corpus[i].labels, img_rows[i - start]);
    }
  }
  result.computed_stages = stats.computed;
  result.cached_stages = stats.cached;
  return result;
}

std::string CellSpec::name() const {
  std::string s = to_string(problem);
  if (!representation.empty()) {
    s += "." + representation + "." + vectorization;
    if (!dims.empty()) s += "." + dims_tag(dims);
  }
  if (with_mfcc) s += ".mfcc";
  return s;
}

void CellSpec::validate() const {
  static const std::set<std::string> kVectorizations = {"variables", "silhouette", "image"};
  if (!kVectorizations.count(vectorization))
    fail(ErrorCode::kInvalidParameter, "unknown vectorization '" + vectorization + "'");
  if (representation.empty()) {
    if (!with_mfcc) fail(ErrorCode::kInvalidParameter, "a cell needs a representation, MFCCs or both");
    if (vectorization != "variables" || !dims.empty())
      fail(ErrorCode::kInvalidParameter, "MFCC-only cells take no vectorization or dims");
    return;
  }
  if (representation != "all") homology_dims(representation);
  if (vectorization == "variables") {
    if (!dims.empty()) fail(ErrorCode::kInvalidParameter, "dims apply to silhouette and image cells only");
    return;
  }
  if (representation == "all") fail(ErrorCode::kInvalidParameter, "functional summaries need a single representation");
  if (with_mfcc) fail(ErrorCode::kInvalidParameter, "functional summaries are not combined with MFCCs");
  const auto allowed = homology_dims(representation);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (std::find(allowed.begin(), allowed.end(), dims[i]) == allowed.end())
      fail(ErrorCode::kInvalidParameter,
           "dimension " + std::to_string(dims[i]) + " is not computed for " + representation);
    if (i > 0 && dims[i] <= dims[i - 1]) fail(ErrorCode::kInvalidParameter, "dims must be strictly increasing");
  }
}

std::vector<std::string> cell_columns(const FeatureTable& table, const CellSpec& spec) {
  spec.validate();
  std::vector<std::string> prefixes;
  if (spec.vectorization == "variables") {
    if (spec.representation == "all") {
      for (const auto& r : representation_names()) prefixes.push_back(r + ".");
    } else if (!spec.representation.empty()) {
      prefixes.push_back(spec.representation + ".");
    }
    if (spec.with_mfcc) prefixes.push_back("mfcc.");
  } else {
    const std::string kind = spec.vectorization == "silhouette" ? ".sil." : ".img.";
    const auto dims = spec.dims.empty() ? homology_dims(spec.representation) : spec.dims;
    for (int p : dims) prefixes.push_back(domain_key(spec.representation, p) + kind);
  }
  auto cols = columns_with_prefix(table, prefixes);
  if (cols.empty())
    fail(ErrorCode::kMissingStage, "no feature columns for cell " + spec.name() +
                                       "; featurize with the representation enabled first");
  return cols;
}

std::vector<std::string> cell_columns(const FeaturizeResult& features, const CellSpec& spec) {
  spec.validate();
  if (spec.vectorization == "silhouette") return cell_columns(features.silhouettes, spec);
  if (spec.vectorization == "image") return cell_columns(features.images, spec);
  return cell_columns(features.variables, spec);
}

namespace {

Dataset cell_dataset(const FeatureTable& table, const CellSpec& spec) {
  const auto cols = cell_columns(table, spec);
  auto data = drop_constant_features(make_dataset(table, cols, spec.problem));
  if (data.n_features() == 0) fail(ErrorCode::kDegenerateSignal, "every feature of " + spec.name() + " is constant");
  return data;
}

}  // namespace

CellResult run_forest_cell(const FeatureTable& table, const CellSpec& spec, const ForestParams& params) {
  const auto data = cell_dataset(table, spec);
  const auto model = train_forest(data, params);
  CellResult r;
  r.spec = spec;
  r.method = "forest";
  r.oob = model.oob_error;
  r.n_rows = data.n_rows;
  r.n_features = data.n_features();
  r.variables = data.feature_names;
  return r;
}

CellResult run_stepwise_cell(const FeatureTable& table, const CellSpec& spec, const ForestParams& params,
                             StepwiseTrace* trace) {
  const auto data = cell_dataset(table, spec);
  auto t = stepwise_select(data, params);
  CellResult r;
  r.spec = spec;
  r.method = "stepwise";
  r.oob = t.best_oob;
  r.n_rows = data.n_rows;
  r.n_features = data.n_features();
  r.variables = t.best_set;
  if (trace != nullptr) *trace = std::move(t);
  return r;
}

std::string cell_result_json(const CellResult& result) {
  nlohmann::ordered_json j;
  j["cell"] = result.spec.name();
  j["problem"] = to_string(result.spec.problem);
  j["representation"] = result.spec.representation;
  j["vectorization"] = result.spec.vectorization;
  j["dims"] = result.spec.dims;
  j["with_mfcc"] = result.spec.with_mfcc;
  j["method"] = result.method;
  j["oob"] = result.oob;
  j["n_rows"] = result.n_rows;
  j["n_features"] = result.n_features;
  j["variables"] = result.variables;
  return j.dump(2) + "\n";
}

CellResult parse_cell_result_json(const std::string& text) {
  CellResult r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.spec.problem = parse_problem(j.at("problem").get<std::string>());
    r.spec.representation = j.at("representation").get<std::string>();
    r.spec.vectorization = j.at("vectorization").get<std::string>();
    r.spec.dims = j.at("dims").get<std::vector<int>>();
    r.spec.with_mfcc = j.at("with_mfcc").get<bool>();
    r.method = j.at("method").get<std::string>();
    r.oob = j.at("oob").get<double>();
    r.n_rows = j.at("n_rows").get<std::size_t>();
    r.n_features = j.at("n_features").get<std::size_t>();
    r.variables = j.at("variables").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("bad cell result: ") + e.what());
  }
  r.spec.validate();
  return r;
}

namespace {

struct Table1Row {
  std::string representation;
  std::string vectorization;
  CellSpec spec;  // problem is filled per column
};

std::string display_name(const std::string& repr) {
  if (repr == "surface") return "Spectrogram surface";
  if (repr == "zeros") return "Spectrogram zeros";
  if (repr == "takens") return "Takens embedding";
  return "All together";
}

std::vector<std::vector<int>> dim_subsets(const std::vector<int>& dims) {
  std::vector<std::vector<int>> out;
  const std::size_t n = dims.size();
  for (std::size_t size = 1; size <= n; ++size) {
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != size) continue;
      std::vector<int> s;
      for (std::size_t b = 0; b < n; ++b) {
        if (mask & (1u << b)) s.push_back(dims[b]);
      }
      out.push_back(s);
    }
  }
  return out;
}

std::string join_dims(const std::vector<int>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "," : "") + std::to_string(dims[i]);
  return s;
}

std::vector<Table1Row> table1_rows() {
  std::vector<Table1Row> rows;
  CellSpec mfcc;
  mfcc.with_mfcc = true;
  rows.push_back({"MFCC", "MFCC", mfcc});
  auto add_block = [&](const std::string& repr) {
    if (repr != "all") {
      for (const char* kind : {"silhouette", "image"}) {
        for (const auto& dims : dim_subsets(homology_dims(repr))) {
          CellSpec s;
          s.representation = repr;
          s.vectorization = kind;
          s.dims = dims;
          const std::string label = std::string(kind) == "silhouette" ? "Silhouettes" : "Persistence image";
          rows.push_back({display_name(repr), label + " p=" + join_dims(dims), s});
        }
      }
    }
    CellSpec v;
    v.representation = repr;
    rows.push_back({display_name(repr), "Persistent variables", v});
    v.with_mfcc = true;
    rows.push_back({display_name(repr), "Topology augmented", v});
  };
  for (const auto& r : representation_names()) add_block(r);
  add_block("all");
  return rows;
}

bool same_cell(const CellSpec& a, const CellSpec& b) {
  return a.problem == b.problem && a.representation == b.representation && a.vectorization == b.vectorization &&
         a.with_mfcc == b.with_mfcc && a.dims == b.dims;
}

std::string percent(double oob) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << 100.0 * oob;
  return out.str();
}

}  // namespace

std::string render_table1(const std::vector<CellResult>& results, const std::map<std::string, std::string>& deviations,
                          const std::string& note) {
  std::ostringstream out;
  out << "# deviations:";
  if (deviations.empty()) out << " none";
  bool first = true;
  for (const auto& [k, v] : deviations) {
    out << (first ? " " : "; ") << k << "=" << v;
    first = false;
  }
  out << "\n";
  if (!note.empty()) out << "# " << note << "\n";
  csv::write_row(out, {"representation", "vectorization", "vowel_oob_pct", "gender_oob_pct", "speaker_oob_pct"});
  for (auto row : table1_rows()) {
    csv::Row line{row.representation, row.vectorization};
    for (Problem p : {Problem::kVowel, Problem::kGender, Problem::kSpeaker}) {
      row.spec.problem = p;
      const CellResult* pick = nullptr;
      for (const auto& r : results) {
        if (!same_cell(r.spec, row.spec)) continue;
        // stepwise selection is the reported method for variable cells
        if (pick == nullptr || r.method == "stepwise" || pick->method != "stepwise") pick = &r;
      }
      line.push_back(pick == nullptr ? "—" : percent(pick->oob));
    }
    csv::write_row(out, line);
  }
  return out.str();
}

std::string render_table2(const std::vector<VariableCount>& counts, const std::vector<std::string>& warnings) {
  std::ostringstream out;
  for (const auto& w : warnings) out << "# " << w << "\n";
  csv::Row header{"variable", "group_size", "count", "max", "percent"};
  for (const auto& r : representation_names()) header.push_back(r + "_pct");
  csv::write_row(out, header);
  for (const auto& c : counts) {
    csv::Row line{c.variable, std::to_string(c.group_size), std::to_string(c.total), std::to_string(c.total_max),
                  c.total_max == 0 ? "∅" : percent(c.percent() / 100.0)};
    for (const auto& r : representation_names()) {
      const auto m = c.per_representation_max.count(r) ? c.per_representation_max.at(r) : 0;
      const auto n = c.per_representation.count(r) ? c.per_representation.at(r) : 0;
      line.push_back(m == 0 ? "∅" : percent(static_cast<double>(n) / static_cast<double>(m)));
    }
    csv::write_row(out, line);
  }
  return out.str();
}

}  // namespace topovox
