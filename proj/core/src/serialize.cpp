#include "semtrace/serialize.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "semtrace/error.hpp"

namespace semtrace {
namespace {

using nlohmann::json;

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

// Shortest round-trip representation; identical bytes for identical values.
std::string fmt(double x) {
  if (!std::isfinite(x)) return "NA";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

const char* to_string(InitMethod init) {
  return init == InitMethod::forgy ? "forgy" : "kmeans++";
}

const char* to_string(Dispersion dispersion) {
  return dispersion == Dispersion::population ? "population" : "sample";
}

json to_json(const SimilaritySummary& s) {
  return json{{"mean", s.mean},
              {"n_pairs", s.n_pairs},
              {"bins", s.bins},
              {"counts", s.counts},
              {"with_replacement", s.with_replacement}};
}

json to_json(const EvalReport& r) {
  json per_label = json::object();
  for (const auto& [label, s] : r.per_label)
    per_label[label] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"support", s.support}};
  return json{{"labels", r.labels},
              {"per_label", per_label},
              {"weighted_f1", r.weighted_f1},
              {"confusion", r.confusion},
              {"n", r.n}};
}

json to_json(const ClusterProfile& p) {
  json neighbors = json::array();
  for (const auto& n : p.top_neighbors) neighbors.push_back({{"word", n.word}, {"count", n.count}});
  return json{{"cluster", p.cluster},
              {"size", p.size},
              {"dominant_label", optional_json(p.dominant_label)},
              {"dominant_rank", optional_json(p.dominant_rank)},
              {"top_neighbors", neighbors},
              {"ais", optional_json(p.ais)}};
}

json to_json(const Heatmap& h) {
  json matrix = json::array();
  for (const auto& row : h.matrix) {
    json r = json::array();
    for (double x : row) r.push_back(number_or_null(x));
    matrix.push_back(r);
  }
  return json{{"order", h.order},
              {"sizes", h.sizes},
              {"matrix", matrix},
              {"insufficient", h.insufficient},
              {"mean_ais_minus_aps", optional_json(h.mean_ais_minus_aps)}};
}

json to_json(const PurityReport& r) {
  return json{{"distributions", r.distributions},
              {"per_cluster_cv", r.per_cluster_cv},
              {"weights", r.weights},
              {"wa_cv", r.wa_cv},
              {"tm", r.tm},
              {"purity", r.purity},
              {"permutation", r.permutation},
              {"dispersion", to_string(r.dispersion)}};
}

json to_json(const ClusteringSolution& s) {
  json assignment = json::object();
  for (std::size_t i = 0; i < s.occurrence_ids.size(); ++i) assignment[s.occurrence_ids[i]] = s.assignment[i];
  return json{{"k", s.k},
              {"seed", s.seed},
              {"centroids", s.centroids},
              {"assignment", assignment},
              {"sizes", s.sizes()},
              {"inertia", s.inertia},
              {"iterations", s.iterations},
              {"converged", s.converged},
              {"inertia_trace", s.inertia_trace}};
}

ClusteringSolution solution_from_json(const json& doc) {
  try {
    ClusteringSolution s;
    s.k = doc.at("k").get<std::size_t>();
    s.seed = doc.at("seed").get<std::uint64_t>();
    s.centroids = doc.at("centroids").get<std::vector<std::vector<double>>>();
    s.inertia = doc.at("inertia").get<double>();
    s.iterations = doc.value("iterations", 0);
    s.converged = doc.value("converged", false);
    if (doc.contains("inertia_trace")) s.inertia_trace = doc["inertia_trace"].get<std::vector<double>>();
    for (const auto& [id, cluster] : doc.at("assignment").items()) {
      s.occurrence_ids.push_back(id);
      s.assignment.push_back(cluster.get<std::size_t>());
      if (s.assignment.back() >= s.k) throw ValidationError("assignment of \"" + id + "\" exceeds k");
    }
    if (s.k < 1 || s.centroids.size() != s.k) throw ValidationError("solution centroid count differs from k");
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed clustering solution: ") + e.what());
  }
}

void write_heatmap_csv(const Heatmap& h, std::ostream& out) {
  out << "cluster";
  for (std::size_t c : h.order) out << ",cluster_" << c;
  out << '\n';
  for (std::size_t a = 0; a < h.order.size(); ++a) {
    out << "cluster_" << h.order[a];
    for (double x : h.matrix[a]) out << ',' << fmt(x);
    out << '\n';
  }
}

void write_series_csv(const YearSeries& ys, std::ostream& out) {
  const double dated = static_cast<double>(std::accumulate(ys.totals.begin(), ys.totals.end(), std::size_t{0}));
  out << "year";
  for (std::size_t c = 0; c < ys.k; ++c) out << ",cluster_" << c;
  out << ",total,overall_rel_freq\n";
  for (std::size_t t = 0; t < ys.years.size(); ++t) {
    out << ys.years[t];
    for (double f : ys.norm_freq[t]) out << ',' << fmt(f);
    out << ',' << ys.totals[t] << ',' << fmt(static_cast<double>(ys.totals[t]) / dated) << '\n';
  }
}

void write_change_csv(const ChangeSeries& cs, std::ostream& out) {
  out << "year_from,year_to,jsd,cdpt\n";
  for (const auto& p : cs.points)
    out << p.year_from << ',' << p.year_to << ',' << fmt(p.jsd) << ',' << (p.cdpt ? fmt(*p.cdpt) : "") << '\n';
}

}  // namespace semtrace
