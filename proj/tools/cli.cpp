#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "topovox/cache.hpp"
#include "topovox/config.hpp"
#include "topovox/csv.hpp"
#include "topovox/error.hpp"
#include "topovox/fetch.hpp"
#include "topovox/homology.hpp"
#include "topovox/learn.hpp"
#include "topovox/pipeline.hpp"
#include "topovox/svg.hpp"

namespace topovox::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out_dir;

  std::string problem;
  std::string repr;
  bool with_mfcc = false;
  std::string vectorization = "variables";
  std::string dims;

  std::string url;
  std::string sha256;
  std::string local;
  std::size_t limit = 0;

  std::string id;
  std::string points;
};

PipelineConfig resolve_config(const Options& o) {
  PipelineConfig c = o.config_path.empty() ? default_config() : load_config(o.config_path);
  if (o.seed) c.forest.seed = *o.seed;
  if (o.workers) {
    c.workers = *o.workers;
    c.forest.threads = *o.workers;
  }
  if (!o.out_dir.empty()) c.output_dir = o.out_dir;
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  csv::write_file_atomic(path, text);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path require(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path))
    fail(ErrorCode::kMissingStage, path.string() + " not found; run `topovox " + producer + "` first");
  return path;
}

FeatureTable load_table(const fs::path& path) {
  std::ifstream in(require(path, "featurize"));
  return read_feature_table(in);
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    if (part.size() != 1 || part[0] < '0' || part[0] > '9')
      fail(ErrorCode::kInvalidParameter, "--dims expects a comma list of homology dimensions, got '" + text + "'");
    dims.push_back(part[0] - '0');
  }
  return dims;
}

CellSpec cell_from(const Options& o) {
  if (o.problem.empty()) fail(ErrorCode::kInvalidParameter, "--problem is required");
  CellSpec s;
  s.problem = parse_problem(o.problem);
  s.representation = o.repr;
  s.with_mfcc = o.with_mfcc;
  s.vectorization = o.vectorization;
  s.dims = parse_dims(o.dims);
  s.validate();
  return s;
}

FeatureTable table_for(const PipelineConfig& c, const CellSpec& s) {
  if (s.vectorization == "silhouette") return load_table(c.output_dir / "silhouettes.csv");
  if (s.vectorization == "image") return load_table(c.output_dir / "images.csv");
  return load_table(c.output_dir / "features.csv");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- commands ---------------------------------------------------------------

int cmd_fetch(const Options& o, std::ostream& out, std::ostream& err) {
  const auto c = resolve_config(o);
  DatasetManifest manifest;
  if (!o.local.empty()) {
    if (!fs::is_directory(o.local)) fail(ErrorCode::kInvalidParameter, "--local " + o.local + " is not a directory");
    manifest = scan_dataset(o.local);
  } else {
    const std::string url = o.url.empty() ? c.dataset_url : o.url;
    if (url.empty()) fail(ErrorCode::kInvalidParameter, "no dataset url configured; set dataset.url or pass --url");
    FetchOptions fo;
    fo.expected_sha256 = o.sha256.empty() ? c.dataset_sha256 : o.sha256;
    const auto r = fetch_dataset(url, c.dataset_dir, fo);
    manifest = r.manifest;
    out << (r.downloaded ? "downloaded " : "reused ") << r.archive.string() << " sha256=" << r.manifest.checksum
        << "\n";
  }
  if (manifest.entries.empty())
    fail(ErrorCode::kEmptyInput, "no labelled .wav files found; add a labels.csv next to the recordings");
  write_manifest_csv(manifest, c.output_dir / "manifest.csv");
  const auto m = label_marginals(manifest);
  out << "manifest: " << manifest.entries.size() << " recordings, " << m.vowel.size() << " vowels, "
      << m.speaker.size() << " speakers, " << m.gender.size() << " genders, " << m.condition.size()
      << " conditions -> " << (c.output_dir / "manifest.csv").string() << "\n";
  if (!has_full_cardinalities(m)) err << "warning: label cardinalities differ from the full vowel corpus\n";
  return kOk;
}

DatasetManifest load_manifest(const PipelineConfig& c) {
  const auto path = c.output_dir / "manifest.csv";
  if (fs::exists(path)) return read_manifest_csv(path);
  if (fs::is_directory(c.dataset_dir)) {
    auto m = scan_dataset(c.dataset_dir);
    if (!m.entries.empty()) return m;
  }
  fail(ErrorCode::kMissingStage, "no manifest at " + path.string() + "; run `topovox fetch` first");
}

void apply_repr_filter(PipelineConfig& c, const std::string& repr) {
  if (repr.empty() || repr == "all") return;
  homology_dims(repr);
  c.surface = repr == "surface";
  c.zeros = repr == "zeros";
  c.takens = repr == "takens";
}

int cmd_featurize(const Options& o, std::ostream& out, std::ostream& err) {
  auto c = resolve_config(o);
  apply_repr_filter(c, o.repr);
  auto manifest = load_manifest(c);
  if (o.limit != 0 && manifest.entries.size() > o.limit) manifest.entries.resize(o.limit);
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(c.output_dir);
  Cache cache(c.cache_path());

  const auto diagrams_path = c.output_dir / "diagrams.csv";
  auto diagrams_tmp = diagrams_path;
  diagrams_tmp += ".partial";
  std::ofstream diagrams(diagrams_tmp, std::ios::binary | std::ios::trunc);
  if (!diagrams) fail(ErrorCode::kIo, "cannot write " + diagrams_tmp.string());
  const auto result = featurize_corpus(corpus_from_manifest(manifest), c, &cache, &diagrams);
  diagrams.close();
  fs::rename(diagrams_tmp, diagrams_path);

  auto save = [&](const FeatureTable& t, const std::string& name) {
    std::ostringstream s;
    write_feature_table(s, t);
    write_text(c.output_dir / name, s.str());
  };
  save(result.variables, "features.csv");
  save(result.silhouettes, "silhouettes.csv");
  save(result.images, "images.csv");
  std::ostringstream excluded;
  csv::write_row(excluded, {"id", "reason"});
  for (const auto& [id, reason] : result.excluded) csv::write_row(excluded, {id, reason});
  write_text(c.output_dir / "excluded.csv", excluded.str());
  write_text(c.output_dir / "config.used.toml", render_config(c));

  nlohmann::ordered_json summary;
  summary["recordings"] = manifest.entries.size();
  summary["rows"] = result.variables.rows.size();
  summary["excluded"] = result.excluded.size();
  summary["computed_stages"] = result.computed_stages;
  summary["cached_stages"] = result.cached_stages;
  write_text(c.output_dir / "featurize.json", summary.dump(2) + "\n");

  out << "featurized " << result.variables.rows.size() << "/" << manifest.entries.size() << " recordings ("
      << result.variables.columns.size() << " variables) in " << seconds_since(t0) << " s; "
      << result.computed_stages << " stages computed, " << result.cached_stages << " read from cache\n";
  if (!result.excluded.empty()) {
    err << "warning: " << result.excluded.size() << " recordings excluded (partial rows), see "
        << (c.output_dir / "excluded.csv").string() << "\n";
  }
  return kOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  const auto c = resolve_config(o);
  const auto spec = cell_from(o);
  const auto table = table_for(c, spec);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_forest_cell(table, spec, c.forest);
  write_text(c.output_dir / "results" / (spec.name() + ".forest.json"), cell_result_json(r));
  out << spec.name() << ": OOB " << 100.0 * r.oob << "% over " << r.n_rows << " rows, " << r.n_features
      << " features (" << seconds_since(t0) << " s)\n";
  return kOk;
}

int cmd_stepwise(const Options& o, std::ostream& out) {
  const auto c = resolve_config(o);
  const auto spec = cell_from(o);
  if (spec.vectorization != "variables")
    fail(ErrorCode::kInvalidParameter, "stepwise selection runs on persistent variables only");
  const auto table = table_for(c, spec);
  const auto t0 = std::chrono::steady_clock::now();
  StepwiseTrace trace;
  const auto r = run_stepwise_cell(table, spec, c.forest, &trace);
  const std::map<std::string, std::string> meta = {{"cell", spec.name()},
                                                   {"problem", to_string(spec.problem)},
                                                   {"representation", spec.representation},
                                                   {"with_mfcc", spec.with_mfcc ? "true" : "false"},
                                                   {"trees", std::to_string(c.forest.n_trees)},
                                                   {"seed", std::to_string(c.forest.seed)},
                                                   {"rows", std::to_string(r.n_rows)}};
  std::ostringstream json;
  write_trace_json(json, trace, meta);
  write_text(c.output_dir / "traces" / (spec.name() + ".json"), json.str());
  write_text(c.output_dir / "trace.json", json.str());
  write_text(c.output_dir / "results" / (spec.name() + ".stepwise.json"), cell_result_json(r));
  out << spec.name() << ": best OOB " << 100.0 * r.oob << "% with " << r.variables.size() << " of " << r.n_features
      << " variables (" << seconds_since(t0) << " s)\n";
  return kOk;
}

std::vector<fs::path> json_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) return files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  const auto c = resolve_config(o);
  std::vector<CellResult> results;
  for (const auto& f : json_files(c.output_dir / "results")) results.push_back(parse_cell_result_json(read_text(f)));
  if (results.empty())
    fail(ErrorCode::kMissingStage, "no results under " + (c.output_dir / "results").string() +
                                       "; run `topovox train` or `topovox stepwise` first");
  std::size_t rows = 0;
  for (const auto& r : results) rows = std::max(rows, r.n_rows);
  std::string note = "OOB error in percent; trees=" + std::to_string(c.forest.n_trees) +
                     " seed=" + std::to_string(c.forest.seed) + " rows=" + std::to_string(rows);
  const auto featurize_summary = c.output_dir / "featurize.json";
  if (fs::exists(featurize_summary)) {
    const auto j = nlohmann::json::parse(read_text(featurize_summary));
    if (j.value("excluded", 0) > 0) note += " excluded=" + std::to_string(j.value("excluded", 0)) + " (partial corpus)";
  }
  const auto table1 = render_table1(results, c.deviations, note);
  write_text(c.output_dir / "table1.csv", table1);
  out << table1;

  std::vector<BestModel> models;
  for (const auto& f : json_files(c.output_dir / "traces")) {
    std::ifstream in(f);
    std::map<std::string, std::string> meta;
    const auto trace = read_trace_json(in, &meta);
    if (!meta.count("problem") || meta["representation"].empty()) continue;
    models.push_back({parse_problem(meta["problem"]), meta["representation"], meta["with_mfcc"] == "true",
                      trace.best_set});
  }
  if (models.empty()) {
    err << "note: no stepwise traces yet, table2.csv not written\n";
    return kOk;
  }
  std::vector<std::string> universe;
  const auto features = c.output_dir / "features.csv";
  if (fs::exists(features)) {
    std::ifstream in(features);
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header + "\n");
    const auto rows_read = csv::read_all(hs);
    if (!rows_read.empty()) universe = rows_read.front();
  }
  std::vector<std::string> warnings;
  const auto counts = count_best_model_variables(models, universe, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  const auto table2 = render_table2(counts, warnings);
  write_text(c.output_dir / "table2.csv", table2);
  out << "table2.csv: " << counts.size() << " variable families over " << models.size() << " best models\n";
  return kOk;
}

PointCloud read_points_csv(const fs::path& path) {
  const auto rows = csv::read_file(require(path, "plot --points with an existing file"));
  PointCloud cloud;
  for (const auto& row : rows) {
    if (row.empty() || (row.size() == 1 && row[0].empty()) || (!row[0].empty() && row[0][0] == '#')) continue;
    std::vector<double> p;
    try {
      for (const auto& f : row) p.push_back(csv::parse_double(f));
    } catch (const Error&) {
      if (cloud.dim == 0 && cloud.coords.empty()) continue;  // header row
      throw;
    }
    if (cloud.dim == 0) cloud.dim = p.size();
    if (p.size() != cloud.dim) fail(ErrorCode::kFormat, "ragged point file " + path.string());
    cloud.push_back(p);
  }
  if (cloud.size() == 0) fail(ErrorCode::kEmptyInput, "no points in " + path.string());
  return cloud;
}

int cmd_plot(const Options& o, std::ostream& out) {
  const auto c = resolve_config(o);
  const auto dir = c.output_dir / "plots";
  if (!o.points.empty()) {
    const auto diagram = compute_persistence(alpha_filtration(read_points_csv(o.points)));
    const auto path = dir / (fs::path(o.points).stem().string() + ".diagram.svg");
    write_text(path, diagram_svg(diagram, "alpha diagram of " + fs::path(o.points).filename().string()));
    for (const auto& q : diagram.points)
      out << "H" << q.dim << " " << csv::format_double(q.birth) << " " << csv::format_double(q.death) << "\n";
    out << "wrote " << path.string() << "\n";
    return kOk;
  }
  if (!o.id.empty()) {
    std::ifstream in(require(c.output_dir / "diagrams.csv", "featurize"));
    std::map<std::string, PersistenceDiagram> diagrams;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.compare(0, o.id.size(), o.id) != 0 && line.find(o.id) == std::string::npos) continue;
      std::istringstream ls(line + "\n");
      const auto rows = csv::read_all(ls);
      if (rows.empty() || rows[0].size() != 5 || rows[0][0] != o.id) continue;
      PersistencePair q;
      q.dim = std::stoi(rows[0][2]);
      q.birth = csv::parse_double(rows[0][3]);
      q.death = csv::parse_double(rows[0][4]);
      diagrams[rows[0][1]].points.push_back(q);
    }
    if (diagrams.empty()) fail(ErrorCode::kInvalidParameter, "recording '" + o.id + "' has no diagrams");
    for (auto& [repr, d] : diagrams) {
      d.min_value = INFINITY;
      d.max_value = -INFINITY;
      for (const auto& q : d.points) {
        d.min_value = std::min(d.min_value, q.birth);
        d.max_value = std::max(d.max_value, std::isfinite(q.death) ? q.death : q.birth);
      }
      const auto path = dir / (o.id + "." + repr + ".svg");
      write_text(path, diagram_svg(d, o.id + " (" + repr + ")"));
      out << "wrote " << path.string() << "\n";
    }
    return kOk;
  }
  const auto table = load_table(c.output_dir / "features.csv");
  const Problem problem = o.problem.empty() ? Problem::kVowel : parse_problem(o.problem);
  std::vector<std::string> reprs = o.repr.empty() || o.repr == "all" ? representation_names()
                                                                      : std::vector<std::string>{o.repr};
  if (o.repr == "all") reprs.push_back("all");
  std::size_t written = 0;
  for (const auto& repr : reprs) {
    CellSpec s;
    s.problem = problem;
    s.representation = repr;
    std::vector<std::string> cols;
    try {
      cols = cell_columns(table, s);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kMissingStage && o.repr.empty()) continue;
      throw;
    }
    const auto data = drop_constant_features(make_dataset(table, cols, problem));
    std::vector<double> explained;
    const auto xy = project_2d(data, &explained);
    std::vector<ScatterPoint> pts;
    for (std::size_t i = 0; i < data.n_rows; ++i)
      pts.push_back({xy[2 * i], xy[2 * i + 1], data.classes[static_cast<std::size_t>(data.y[i])]});
    std::ostringstream title;
    title.precision(3);
    title << repr << " persistent variables by " << to_string(problem) << " (PCA, "
          << 100.0 * (explained.size() > 1 ? explained[0] + explained[1] : 0.0) << "% variance)";
    const auto path = dir / ("projection." + repr + "." + to_string(problem) + ".svg");
    write_text(path, scatter_svg(pts, title.str(), "PC1", "PC2"));
    out << "wrote " << path.string() << "\n";
    ++written;
  }
  if (written == 0) fail(ErrorCode::kMissingStage, "features.csv has no persistent variables; run featurize");
  return kOk;
}

int exit_code_for(const Error& e) {
  // a malformed filtration is a bug in this program, not in the input
  return e.code() == ErrorCode::kInvalidFiltration ? kInternalError : kUserError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topological features of speech recordings and random-forest classification", "topovox"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "TOML-style configuration file");
  app.add_option("--seed", o.seed, "Random forest seed");
  app.add_option("--workers,-j", o.workers, "Worker threads (0 = all cores)");
  app.add_option("--out", o.out_dir, "Output directory (overrides output.dir)");

  const std::vector<std::string> problems = {"vowel", "gender", "speaker"};
  const std::vector<std::string> reprs = {"surface", "zeros", "takens", "all"};
  auto add_cell_options = [&](CLI::App* sub, bool with_vectorization) {
    sub->add_option("--problem", o.problem, "Classification target")->check(CLI::IsMember(problems));
    sub->add_option("--repr", o.repr, "Representation")->check(CLI::IsMember(reprs));
    sub->add_flag("--with-mfcc", o.with_mfcc, "Add MFCC variables");
    if (with_vectorization) {
      sub->add_option("--vectorization", o.vectorization, "variables, silhouette or image")
          ->check(CLI::IsMember({"variables", "silhouette", "image"}));
      sub->add_option("--dims", o.dims, "Homology dimensions for functional summaries, e.g. 0,1");
    }
  };

  auto* fetch = app.add_subcommand("fetch", "Download and unpack the corpus, write manifest.csv");
  fetch->add_option("--url", o.url, "Archive URL or zenodo:<record>");
  fetch->add_option("--sha256", o.sha256, "Expected archive checksum");
  fetch->add_option("--local", o.local, "Scan an existing directory instead of downloading");
  auto* featurize = app.add_subcommand("featurize", "Compute diagrams, persistent variables and MFCCs");
  featurize->add_option("--repr", o.repr, "Restrict to one representation")->check(CLI::IsMember(reprs));
  featurize->add_option("--limit", o.limit, "Only the first N recordings of the manifest");
  auto* train = app.add_subcommand("train", "Random forest on one results cell");
  add_cell_options(train, true);
  auto* stepwise = app.add_subcommand("stepwise", "Backward stepwise selection on persistent variables");
  add_cell_options(stepwise, false);
  auto* report = app.add_subcommand("report", "Assemble table1.csv and table2.csv");
  auto* plot = app.add_subcommand("plot", "SVG persistence diagrams and 2D projections");
  plot->add_option("--id", o.id, "Recording id whose diagrams to plot");
  plot->add_option("--points", o.points, "CSV point cloud (2D or 3D) to plot an alpha diagram for");
  plot->add_option("--problem", o.problem, "Label used to colour projections")->check(CLI::IsMember(problems));
  plot->add_option("--repr", o.repr, "Representation to project")->check(CLI::IsMember(reprs));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUserError;
  }

  try {
    if (fetch->parsed()) return cmd_fetch(o, out, err);
    if (featurize->parsed()) return cmd_featurize(o, out, err);
    if (train->parsed()) return cmd_train(o, out);
    if (stepwise->parsed()) return cmd_stepwise(o, out);
    if (report->parsed()) return cmd_report(o, out, err);
    if (plot->parsed()) return cmd_plot(o, out);
  } catch (const Error& e) {
    err << "topovox: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "topovox: io: " << e.what() << "\n";
    return kUserError;
  } catch (const std::exception& e) {
    err << "topovox: internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kUserError;
}

}  // namespace topovox::cli
