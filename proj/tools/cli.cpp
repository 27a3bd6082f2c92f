#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "manifest.hpp"
#include "semtrace/corpus.hpp"
#include "semtrace/error.hpp"
#include "semtrace/lsc.hpp"
#include "semtrace/purity.hpp"
#include "semtrace/serialize.hpp"
#include "semtrace/vectormath.hpp"
#include "semtrace/wsd.hpp"
#include "semtrace/wsi.hpp"

#ifndef SEMTRACE_DEFAULT_STOPWORDS
#define SEMTRACE_DEFAULT_STOPWORDS "stopwords-en-v1.txt"
#endif

namespace semtrace::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": malformed JSON: " + e.what());
  }
}

// "out.json" -> "out.<suffix>"
fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension(suffix);
  return p;
}

struct IngestOptions {
  std::string dataset;
  std::size_t dim = 0;
  std::string out;
};

struct WsdOptions {
  std::string dataset;
  std::size_t labels = 0;
  std::string split = "none";
  std::uint64_t seed = 0;
  std::string out;
};

struct ClusterOptions {
  std::string dataset;
  std::size_t k = 0;
  std::size_t labels = 0;
  std::size_t restarts = 100;
  std::uint64_t seed = 0;
  int max_iter = 300;
  double tol = 1e-6;
  std::string init = "forgy";
  std::string stopwords = SEMTRACE_DEFAULT_STOPWORDS;
  std::string heatmap_csv;
  unsigned threads = 0;
  std::string out;
};

struct PurityOptions {
  std::string solution;
  std::string dataset;
  std::size_t labels = 0;
  std::string sigma = "population";
  std::string out;
};

struct CohesionOptions {
  std::string solution;
  std::string dataset;
  std::string csv;
  std::string out;
};

struct LscOptions {
  std::string dataset;
  std::string solution;
  std::string change_out;
  std::string log_base = "2";
  std::string out;
};

struct IsotropyOptions {
  std::string dataset;
  std::size_t tokens = 200000;
  std::size_t pairs = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int ingest_check(const IngestOptions& o) {
  const Dataset ds = load_dataset(o.dataset, o.dim ? std::optional<std::size_t>(o.dim) : std::nullopt);
  std::size_t labeled = 0, dated = 0, with_context = 0;
  std::optional<int> first, last;
  std::set<std::string> corpora;
  for (const auto& r : ds.records) {
    labeled += r.label.has_value();
    with_context += r.context_tokens.has_value();
    corpora.insert(r.corpus_id);
    if (r.year) {
      ++dated;
      first = first ? std::min(*first, *r.year) : *r.year;
      last = last ? std::max(*last, *r.year) : *r.year;
    }
  }
  json labels = json::array();
  int rank = 0;
  for (const auto& [label, count] : label_counts(ds)) labels.push_back({{"label", label}, {"count", count}, {"rank", ++rank}});
  json report{{"n_records", ds.size()},
              {"dim", ds.dim},
              {"labeled", labeled},
              {"unlabeled", ds.size() - labeled},
              {"dated", dated},
              {"with_context", with_context},
              {"year_range", first ? json::array({*first, *last}) : json()},
              {"corpus_ids", corpora},
              {"labels", labels}};
  if (o.out.empty()) {
    std::cout << dump(report);
    return kExitOk;
  }
  write_text(o.out, dump(report));
  RunManifest m;
  m.subcommand = "ingest-check";
  m.flags = {{"dataset", o.dataset}, {"dim", o.dim}, {"out", o.out}};
  m.add_dataset("dataset", o.dataset);
  m.add_output("report", o.out);
  write_manifest(m, o.out);
  return kExitOk;
}

int wsd_eval(const WsdOptions& o) {
  const Dataset ds = load_dataset(o.dataset);
  const LabelSubset subset = build_label_subset(ds, o.labels);
  const Dataset pool = filter_records(ds, &subset);

  EvalReport report;
  if (o.split == "none") {
    report = evaluate(pool, build_prototypes(pool, subset));
  } else {
    const auto split = stratified_split(pool, subset, 0.8, o.seed);
    report = evaluate(split.test, build_prototypes(split.train, subset));
  }
  json doc = to_json(report);
  doc["split"] = o.split;
  doc["k"] = o.labels;
  write_text(o.out, dump(doc));

  RunManifest m;
  m.subcommand = "wsd-eval";
  m.flags = {{"dataset", o.dataset}, {"labels", o.labels}, {"split", o.split}, {"seed", o.seed}, {"out", o.out}};
  m.seeds["split"] = o.seed;
  m.add_dataset("dataset", o.dataset);
  m.add_output("report", o.out);
  write_manifest(m, o.out);
  return kExitOk;
}

int cluster(const ClusterOptions& o) {
  const Dataset full = load_dataset(o.dataset);
  const StopWords stop_words = StopWords::load(o.stopwords);

  Dataset ds = full;
  std::optional<LabelSubset> subset;
  if (o.labels) {
    subset = build_label_subset(full, o.labels);
    ds = filter_records(full, &*subset);
  }
  const std::size_t k = o.k ? o.k : subset ? subset->k() : 0;
  if (k == 0) throw ValidationError("cluster needs --k or --labels");

  KMeansOptions km;
  km.max_iter = o.max_iter;
  km.tol = o.tol;
  km.init = o.init == "forgy" ? InitMethod::forgy : InitMethod::kmeans_plus_plus;

  const RestartResult result = best_of(ds, k, o.restarts, o.seed, km, o.threads);
  const auto profiles = profile_clusters(result.best, ds, label_ranks(full), stop_words);
  const Heatmap heatmap = heatmap_data(result.best, ds);

  json doc = to_json(result.best);
  doc["base_seed"] = o.seed;
  doc["restarts"] = o.restarts;
  doc["restart_inertia"] = result.restart_inertia;
  doc["init"] = to_string(km.init);
  doc["max_iter"] = km.max_iter;
  doc["tol"] = km.tol;
  doc["label_subset"] = subset ? json(subset->labels) : json();
  json prof = json::array();
  for (const auto& p : profiles) prof.push_back(to_json(p));
  doc["profiles"] = prof;
  doc["permutation"] = permutation_string(profiles);
  doc["heatmap"] = to_json(heatmap);
  const std::string stop_hash = sha256_file(o.stopwords);
  doc["stopwords_sha256"] = stop_hash;
  write_text(o.out, dump(doc));

  const fs::path csv = o.heatmap_csv.empty() ? sibling(o.out, ".heatmap.csv") : fs::path(o.heatmap_csv);
  std::ostringstream csv_text;
  write_heatmap_csv(heatmap, csv_text);
  write_text(csv, csv_text.str());

  RunManifest m;
  m.subcommand = "cluster";
  m.flags = {{"dataset", o.dataset}, {"k", o.k},           {"labels", o.labels},     {"restarts", o.restarts},
             {"seed", o.seed},       {"max_iter", o.max_iter}, {"tol", o.tol},      {"init", o.init},
             {"stopwords", o.stopwords}, {"heatmap_csv", csv.string()}, {"threads", o.threads}, {"out", o.out}};
  m.seeds["base_seed"] = o.seed;
  m.seeds["best_seed"] = result.best.seed;
  m.stopwords_sha256 = stop_hash;
  m.add_dataset("dataset", o.dataset);
  m.add_input("stopwords", o.stopwords);
  m.add_output("solution", o.out);
  m.add_output("heatmap_csv", csv);
  write_manifest(m, o.out);
  return kExitOk;
}

int purity(const PurityOptions& o) {
  const ClusteringSolution sol = solution_from_json(read_json(o.solution));
  const Dataset full = load_dataset(o.dataset);
  const LabelSubset subset = build_label_subset(full, o.labels);
  const Dataset ds = filter_records(full, &subset);
  const Dispersion disp = o.sigma == "population" ? Dispersion::population : Dispersion::sample;

  json doc = to_json(purity_score(sol, ds, subset, disp));
  doc["labels"] = subset.labels;
  write_text(o.out, dump(doc));

  RunManifest m;
  m.subcommand = "purity";
  m.flags = {{"solution", o.solution}, {"dataset", o.dataset}, {"labels", o.labels}, {"sigma", o.sigma}, {"out", o.out}};
  m.add_dataset("dataset", o.dataset);
  m.add_input("solution", o.solution);
  m.add_output("report", o.out);
  write_manifest(m, o.out);
  return kExitOk;
}

// Only records covered by the solution take part.
Dataset covered_records(const Dataset& full, const ClusteringSolution& sol) {
  std::set<std::string> ids(sol.occurrence_ids.begin(), sol.occurrence_ids.end());
  Dataset ds;
  ds.dim = full.dim;
  ds.source_path = full.source_path;
  for (const auto& r : full.records)
    if (ids.contains(r.occurrence_id)) ds.records.push_back(r);
  if (ds.empty()) throw ValidationError("no dataset record is covered by the solution");
  return ds;
}

int cohesion(const CohesionOptions& o) {
  const ClusteringSolution sol = solution_from_json(read_json(o.solution));
  const Dataset ds = covered_records(load_dataset(o.dataset), sol);
  const Heatmap h = heatmap_data(sol, ds);
  write_text(o.out, dump(to_json(h)));
  const fs::path csv = o.csv.empty() ? sibling(o.out, ".csv") : fs::path(o.csv);
  std::ostringstream text;
  write_heatmap_csv(h, text);
  write_text(csv, text.str());

  RunManifest m;
  m.subcommand = "cohesion";
  m.flags = {{"solution", o.solution}, {"dataset", o.dataset}, {"csv", csv.string()}, {"out", o.out}};
  m.add_dataset("dataset", o.dataset);
  m.add_input("solution", o.solution);
  m.add_output("heatmap", o.out);
  m.add_output("heatmap_csv", csv);
  write_manifest(m, o.out);
  return kExitOk;
}

int lsc(const LscOptions& o) {
  const ClusteringSolution sol = solution_from_json(read_json(o.solution));
  const Dataset ds = covered_records(load_dataset(o.dataset), sol);
  const LogBase base = o.log_base == "2" ? LogBase::two : LogBase::natural;
  const YearSeries ys = year_series(ds, sol);
  const ChangeSeries cs = change_series(ds, sol, base);

  std::ostringstream series, change;
  write_series_csv(ys, series);
  write_change_csv(cs, change);
  const fs::path change_path = o.change_out.empty() ? sibling(o.out, ".change.csv") : fs::path(o.change_out);
  write_text(o.out, series.str());
  write_text(change_path, change.str());
  if (ys.undated) std::cerr << "lsc: " << ys.undated << " undated record(s) excluded\n";

  RunManifest m;
  m.subcommand = "lsc";
  m.flags = {{"dataset", o.dataset}, {"solution", o.solution}, {"change_out", change_path.string()},
             {"log_base", o.log_base}, {"out", o.out}};
  m.add_dataset("dataset", o.dataset);
  m.add_input("solution", o.solution);
  m.add_output("series", o.out);
  m.add_output("change", change_path);
  write_manifest(m, o.out);
  return kExitOk;
}

int isotropy(const IsotropyOptions& o) {
  const Dataset ds = load_dataset(o.dataset);
  const std::size_t pairs = o.pairs ? o.pairs : o.tokens / 2;
  const SimilaritySummary s = acs_isotropy(ds, o.tokens, pairs, o.seed);
  json doc = to_json(s);
  doc["n_tokens"] = o.tokens;
  write_text(o.out, dump(doc));

  RunManifest m;
  m.subcommand = "isotropy";
  m.flags = {{"dataset", o.dataset}, {"tokens", o.tokens}, {"pairs", pairs}, {"seed", o.seed}, {"out", o.out}};
  m.seeds["sampling"] = o.seed;
  m.add_dataset("dataset", o.dataset);
  m.add_output("summary", o.out);
  write_manifest(m, o.out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"semtrace: sense analytics over contextualized embedding records"};
  app.set_config("--config", "", "Read flags from a TOML-style file");
  app.require_subcommand(1);

  IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest-check", "Validate a dataset and summarize it");
  c_ingest->add_option("--dataset", ingest.dataset, "JSONL record file")->required();
  c_ingest->add_option("--dim", ingest.dim, "Expected vector dimension");
  c_ingest->add_option("--out", ingest.out, "Report JSON (stdout when omitted)");

  WsdOptions wsd;
  auto* c_wsd = app.add_subcommand("wsd-eval", "Nearest-prototype sense prediction and weighted F-1");
  c_wsd->add_option("--dataset", wsd.dataset)->required();
  c_wsd->add_option("--labels", wsd.labels, "Use the k most frequent labels")->required()->check(CLI::Range(2, 1000));
  c_wsd->add_option("--split", wsd.split)->check(CLI::IsMember({"none", "stratified2080"}))->capture_default_str();
  c_wsd->add_option("--seed", wsd.seed)->capture_default_str();
  c_wsd->add_option("--out", wsd.out)->required();

  ClusterOptions cl;
  auto* c_cluster = app.add_subcommand("cluster", "K-means sense induction, best of N restarts");
  c_cluster->add_option("--dataset", cl.dataset)->required();
  c_cluster->add_option("--k", cl.k, "Number of clusters (defaults to --labels)");
  c_cluster->add_option("--labels", cl.labels, "Restrict to the k most frequent labels");
  c_cluster->add_option("--restarts", cl.restarts)->capture_default_str()->check(CLI::PositiveNumber);
  c_cluster->add_option("--seed", cl.seed)->capture_default_str();
  c_cluster->add_option("--max-iter", cl.max_iter)->capture_default_str()->check(CLI::PositiveNumber);
  c_cluster->add_option("--tol", cl.tol)->capture_default_str()->check(CLI::NonNegativeNumber);
  c_cluster->add_option("--init", cl.init)->check(CLI::IsMember({"forgy", "kmeans++"}))->capture_default_str();
  c_cluster->add_option("--stopwords", cl.stopwords)->capture_default_str();
  c_cluster->add_option("--heatmap-csv", cl.heatmap_csv, "Defaults to <out stem>.heatmap.csv");
  c_cluster->add_option("--threads", cl.threads, "Restart worker threads (0 = hardware)");
  c_cluster->add_option("--out", cl.out)->required();

  PurityOptions pu;
  auto* c_purity = app.add_subcommand("purity", "CV-based purity of a clustering solution");
  c_purity->add_option("--solution", pu.solution)->required();
  c_purity->add_option("--dataset", pu.dataset)->required();
  c_purity->add_option("--labels", pu.labels)->required()->check(CLI::Range(2, 1000));
  c_purity->add_option("--sigma", pu.sigma)->check(CLI::IsMember({"population", "sample"}))->capture_default_str();
  c_purity->add_option("--out", pu.out)->required();

  CohesionOptions co;
  auto* c_cohesion = app.add_subcommand("cohesion", "AIS/APS heatmap of a clustering solution");
  c_cohesion->add_option("--solution", co.solution)->required();
  c_cohesion->add_option("--dataset", co.dataset)->required();
  c_cohesion->add_option("--csv", co.csv, "Defaults to <out stem>.csv");
  c_cohesion->add_option("--out", co.out)->required();

  LscOptions ls;
  auto* c_lsc = app.add_subcommand("lsc", "Per-year cluster frequencies, JSD and CDPT");
  c_lsc->add_option("--dataset", ls.dataset)->required();
  c_lsc->add_option("--solution", ls.solution)->required();
  c_lsc->add_option("--change-out", ls.change_out, "Defaults to <out stem>.change.csv");
  c_lsc->add_option("--log-base", ls.log_base)->check(CLI::IsMember({"2", "e"}))->capture_default_str();
  c_lsc->add_option("--out", ls.out)->required();

  IsotropyOptions iso;
  auto* c_iso = app.add_subcommand("isotropy", "Average cosine similarity over random record pairs");
  c_iso->add_option("--dataset", iso.dataset)->required();
  c_iso->add_option("--tokens", iso.tokens)->capture_default_str();
  c_iso->add_option("--pairs", iso.pairs, "Defaults to tokens/2");
  c_iso->add_option("--seed", iso.seed)->capture_default_str();
  c_iso->add_option("--out", iso.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*c_ingest) return ingest_check(ingest);
    if (*c_wsd) return wsd_eval(wsd);
    if (*c_cluster) return cluster(cl);
    if (*c_purity) return purity(pu);
    if (*c_cohesion) return cohesion(co);
    if (*c_lsc) return lsc(ls);
    if (*c_iso) return isotropy(iso);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace semtrace::cli
