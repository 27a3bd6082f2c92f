#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "semtrace/error.hpp"
#include "semtrace/serialize.hpp"
#include "semtrace/wsi.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace semtrace;

namespace {

ClusteringSolution manual_solution(const Dataset& ds, std::vector<std::size_t> assignment, std::size_t k) {
  ClusteringSolution s;
  s.k = k;
  for (const auto& r : ds.records) s.occurrence_ids.push_back(r.occurrence_id);
  s.assignment = std::move(assignment);
  s.centroids.assign(k, std::vector<double>(ds.dim, 0.0));
  return s;
}

Dataset points(const std::vector<std::vector<float>>& pts) {
  std::vector<EmbeddingRecord> recs;
  for (std::size_t i = 0; i < pts.size(); ++i) recs.push_back(synth::record("p" + std::to_string(i), pts[i]));
  return synth::dataset(std::move(recs));
}

double direct_inertia(const Dataset& ds, const ClusteringSolution& s) {
  double total = 0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t d = 0; d < ds.dim; ++d) {
      const double diff = ds.records[i].vector[d] - s.centroids[s.assignment[i]][d];
      total += diff * diff;
    }
  return total;
}

void check_trace_monotone(const ClusteringSolution& s) {
  for (std::size_t t = 1; t < s.inertia_trace.size(); ++t)
    CHECK(s.inertia_trace[t] <= s.inertia_trace[t - 1] * (1 + 1e-12) + 1e-12);
}

}  // namespace

TEST_CASE("two far-separated pairs split into their pairs") {
  const Dataset ds = points({{0, 0}, {0, 2}, {100, 0}, {100, 2}});
  const auto r = best_of(ds, 2, 20, 0);
  // Each point sits 1 unit from its pair's midpoint.
  CHECK(r.best.inertia == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r.best.assignment[0] == r.best.assignment[1]);
  CHECK(r.best.assignment[2] == r.best.assignment[3]);
  CHECK(r.best.assignment[0] != r.best.assignment[2]);

  KMeansOptions pp;
  pp.init = InitMethod::kmeans_plus_plus;
  CHECK(best_of(ds, 2, 5, 0, pp).best.inertia == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("k = n gives zero inertia") {
  std::mt19937_64 rng(2);
  std::vector<std::vector<float>> pts;
  for (int i = 0; i < 7; ++i) pts.push_back(synth::gaussian(rng, 3));
  const Dataset ds = points(pts);
  const auto s = kmeans(ds, 7, 13);
  CHECK(s.inertia == 0.0);
  for (auto size : s.sizes()) CHECK(size == 1);
}

TEST_CASE("kmeans is deterministic given a seed") {
  const Dataset ds = synth::blobs(3, 20, 5, 3.0, 4);
  const auto a = kmeans(ds, 3, 7);
  const auto b = kmeans(ds, 3, 7);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(a.converged);
}

TEST_CASE("kmeans argument errors") {
  const Dataset ds = points({{0, 0}, {1, 1}});
  CHECK_THROWS_AS(kmeans(ds, 3, 0), ValidationError);
  CHECK_THROWS_AS(kmeans(ds, 1, 0), ValidationError);
  CHECK_THROWS_AS(best_of(ds, 2, 0, 0), ValidationError);
}

TEST_CASE("inertia trace is non-increasing and final state is locally optimal") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset ds = synth::blobs(4, 12, 3, 2.0, rng());
    const auto s = kmeans(ds, 4, trial);
    check_trace_monotone(s);
    CHECK(s.inertia == doctest::Approx(direct_inertia(ds, s)).epsilon(1e-12));
    CHECK(s.inertia == s.inertia_trace.back());
    for (auto size : s.sizes()) CHECK(size > 0);
    if (!s.converged) continue;
    // Reassigning any single point to another centroid never helps.
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t c = 0; c < s.k; ++c) {
        double own = 0, other = 0;
        for (std::size_t d = 0; d < ds.dim; ++d) {
          own += std::pow(ds.records[i].vector[d] - s.centroids[s.assignment[i]][d], 2);
          other += std::pow(ds.records[i].vector[d] - s.centroids[c][d], 2);
        }
        CHECK(own <= other + 1e-12);
      }
  }
}

TEST_CASE("empty clusters are repaired") {
  // Forgy picks k distinct records; with duplicated vectors centroids can
  // coincide and leave clusters empty after assignment.
  const Dataset ds = points({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {5, 5}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = kmeans(ds, 3, seed);
    for (auto size : s.sizes()) CHECK(size > 0);
    CHECK(s.inertia == 0.0);
    check_trace_monotone(s);
  }
}

TEST_CASE("best_of selects the minimum-inertia restart") {
  const Dataset ds = synth::blobs(4, 10, 3, 1.5, 21);
  const auto one = best_of(ds, 4, 1, 5);
  CHECK(to_json(one.best).dump() == to_json(kmeans(ds, 4, 5)).dump());

  const auto many = best_of(ds, 4, 25, 100);
  CHECK(many.restart_inertia.size() == 25);
  const auto min_it = std::min_element(many.restart_inertia.begin(), many.restart_inertia.end());
  CHECK(many.best.inertia == *min_it);
  CHECK(many.best.seed == 100 + static_cast<std::uint64_t>(min_it - many.restart_inertia.begin()));
  for (double x : many.restart_inertia) CHECK(many.best.inertia <= x);
}

TEST_CASE("best_of result does not depend on the thread count") {
  const Dataset ds = synth::blobs(3, 15, 4, 2.0, 8);
  const auto a = best_of(ds, 3, 12, 0, {}, 1);
  const auto b = best_of(ds, 3, 12, 0, {}, 4);
  CHECK(to_json(a.best).dump() == to_json(b.best).dump());
  CHECK(a.restart_inertia == b.restart_inertia);
}

TEST_CASE("best_of with 100 restarts reaches the exhaustive 2-partition optimum") {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<float>> pts;
    std::vector<oracle::Vec> wide;
    for (int i = 0; i < 10; ++i) {
      std::vector<float> p{static_cast<float>(n(rng)), static_cast<float>(n(rng))};
      pts.push_back(p);
      wide.emplace_back(p.begin(), p.end());
    }
    const auto r = best_of(points(pts), 2, 100, 0);
    CHECK(r.best.inertia == doctest::Approx(oracle::best_two_partition(wide)).epsilon(1e-9));
  }
}

TEST_CASE("profile_clusters: dominant label, neighbors and AIS") {
  const StopWords stop(std::set<std::string>{"the", "of"});
  const std::map<std::string, int> ranks{{"MISSION", 1}, {"UNITS", 2}, {"MPS", 3}};
  std::vector<EmbeddingRecord> recs;
  using Tok = std::vector<std::string>;
  recs.push_back(synth::record("0", {1, 0}, "MISSION", 2001, Tok{"the", "satellite", "cmb", "Data"}));
  recs.push_back(synth::record("1", {1, 0.1f}, "MISSION", 2001, Tok{"satellite", "data", "of"}));
  recs.push_back(synth::record("2", {0, 1}, "UNITS", 2002, Tok{"scale", "length"}));
  recs.push_back(synth::record("3", {0.1f, 1}, "MPS", 2002, Tok{"institute"}));
  recs.push_back(synth::record("4", {0.2f, 1}, "MPS", 2002));
  recs.push_back(synth::record("5", {0.3f, 1}, "UNITS", 2002, Tok{"scale"}));
  recs.push_back(synth::record("6", {5, 5}));
  const Dataset ds = synth::dataset(recs);
  const auto sol = manual_solution(ds, {0, 0, 1, 1, 1, 1, 2}, 3);
  const auto profiles = profile_clusters(sol, ds, ranks, stop);

  REQUIRE(profiles.size() == 3);
  CHECK(profiles[0].dominant_label == "MISSION");
  CHECK(profiles[0].dominant_rank == 1);
  CHECK(profiles[0].size == 2);
  REQUIRE(profiles[0].top_neighbors.size() == 3);
  CHECK(profiles[0].top_neighbors[0].word == "data");  // "Data" lowercased, tie with satellite broken lexicographically
  CHECK(profiles[0].top_neighbors[0].count == 2);
  CHECK(profiles[0].top_neighbors[1].word == "satellite");
  CHECK(profiles[0].top_neighbors[2].word == "cmb");

  // 2 UNITS vs 2 MPS: the better-ranked label wins.
  CHECK(profiles[1].dominant_label == "UNITS");
  CHECK(profiles[1].dominant_rank == 2);

  CHECK_FALSE(profiles[2].dominant_label.has_value());
  CHECK_FALSE(profiles[2].ais.has_value());
  CHECK(profiles[0].ais.has_value());
}

TEST_CASE("profile neighbors match a counting oracle") {
  std::mt19937_64 rng(6);
  const std::vector<std::string> vocab{"mission", "cmb", "satellite", "units", "length", "the", "a", "esa", "law"};
  const StopWords stop(std::set<std::string>{"the", "a"});
  std::vector<EmbeddingRecord> recs;
  for (int i = 0; i < 60; ++i) {
    std::vector<std::string> ctx;
    for (int t = 0; t < 12; ++t) ctx.push_back(vocab[rng() % vocab.size()]);
    recs.push_back(synth::record(std::to_string(i), synth::gaussian(rng, 3), std::nullopt, std::nullopt, ctx));
  }
  const Dataset ds = synth::dataset(recs);
  std::vector<std::size_t> assignment;
  for (int i = 0; i < 60; ++i) assignment.push_back(i % 2);
  const auto profiles = profile_clusters(manual_solution(ds, assignment, 2), ds, {}, stop);

  for (std::size_t c = 0; c < 2; ++c) {
    std::unordered_map<std::string, std::size_t> counts;
    for (int i = 0; i < 60; ++i)
      if (assignment[i] == c)
        for (const auto& w : *ds.records[i].context_tokens)
          if (w != "the" && w != "a") ++counts[w];
    std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
      return x.second != y.second ? x.second > y.second : x.first < y.first;
    });
    sorted.resize(6);
    REQUIRE(profiles[c].top_neighbors.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(profiles[c].top_neighbors[i].word == sorted[i].first);
      CHECK(profiles[c].top_neighbors[i].count == sorted[i].second);
    }
  }
}

TEST_CASE("permutation strings") {
  auto prof = [](std::size_t cluster, std::size_t size, std::optional<int> rank) {
    ClusterProfile p;
    p.cluster = cluster;
    p.size = size;
    p.dominant_rank = rank;
    return p;
  };
  const std::vector<ClusterProfile> ordered{prof(0, 20, 3), prof(1, 40, 1), prof(2, 10, 4), prof(3, 30, 2)};
  CHECK(permutation_string(ordered) == "1234");
  const std::vector<ClusterProfile> swapped{prof(0, 40, 1), prof(1, 30, 2), prof(2, 20, 4), prof(3, 10, 3)};
  CHECK(permutation_string(swapped) == "1243");
  const std::vector<ClusterProfile> single{prof(0, 5, 1)};
  CHECK(permutation_string(single) == "1");
  const std::vector<ClusterProfile> unlabeled{prof(0, 5, 1), prof(1, 9, std::nullopt)};
  CHECK(permutation_string(unlabeled) == "?1");
}

TEST_CASE("heatmap of orthogonal duplicate pairs") {
  const Dataset ds = points({{1, 0}, {1, 0}, {0, 1}, {0, 1}});
  const auto h = heatmap_data(manual_solution(ds, {0, 0, 1, 1}, 2), ds);
  CHECK(h.matrix[0][0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(h.matrix[1][1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(h.matrix[0][1] == 0.0);
  CHECK(h.matrix[1][0] == 0.0);
  CHECK(*h.mean_ais_minus_aps == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("heatmap of two identical mixed clusters") {
  // AIS skips self-pairs (cosine 0 here) while APS keeps the matching ones.
  const Dataset ds = points({{1, 0}, {0, 1}, {1, 0}, {0, 1}});
  const auto h = heatmap_data(manual_solution(ds, {0, 0, 1, 1}, 2), ds);
  CHECK(h.matrix[0][0] == 0.0);
  CHECK(h.matrix[0][1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(*h.mean_ais_minus_aps == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("heatmap matches the pair-loop oracle, sorted by size") {
  std::mt19937_64 rng(31);
  std::vector<std::vector<float>> pts;
  std::vector<std::size_t> assignment;
  const std::vector<std::size_t> sizes{3, 6, 4};
  std::vector<std::vector<oracle::Vec>> groups(3);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < sizes[c]; ++i) {
      pts.push_back(synth::gaussian(rng, 5));
      groups[c].emplace_back(pts.back().begin(), pts.back().end());
      assignment.push_back(c);
    }
  const Dataset ds = points(pts);
  const auto h = heatmap_data(manual_solution(ds, assignment, 3), ds);
  CHECK(h.order == std::vector<std::size_t>{1, 2, 0});
  CHECK(h.sizes == std::vector<std::size_t>{6, 4, 3});
  double summary = 0;
  for (std::size_t a = 0; a < 3; ++a) {
    double off = 0;
    for (std::size_t b = 0; b < 3; ++b) {
      const double want = a == b ? oracle::ais(groups[h.order[a]]) : oracle::aps(groups[h.order[a]], groups[h.order[b]]);
      CHECK(h.matrix[a][b] == doctest::Approx(want).epsilon(1e-12));
      CHECK(h.matrix[a][b] == h.matrix[b][a]);
      if (a != b) off += want;
    }
    summary += oracle::ais(groups[h.order[a]]) - off / 2;
  }
  CHECK(*h.mean_ais_minus_aps == doctest::Approx(summary / 3).epsilon(1e-12));
}

TEST_CASE("heatmap flags singleton clusters") {
  const Dataset ds = points({{1, 0}, {0.9f, 0.1f}, {0, 1}});
  const auto h = heatmap_data(manual_solution(ds, {0, 0, 1}, 2), ds);
  CHECK_FALSE(h.insufficient[0]);
  CHECK(h.insufficient[1]);
  CHECK(std::isnan(h.matrix[1][1]));
  CHECK(*h.mean_ais_minus_aps == doctest::Approx(h.matrix[0][0] - h.matrix[0][1]).epsilon(1e-14));
}

TEST_CASE("assignment_for rejects uncovered records") {
  const Dataset ds = points({{1, 0}, {0, 1}});
  auto sol = manual_solution(ds, {0, 1}, 2);
  sol.occurrence_ids[1] = "other";
  CHECK_THROWS_AS(sol.assignment_for(ds), ValidationError);
}

TEST_CASE("solution JSON round-trips") {
  const Dataset ds = synth::blobs(2, 5, 3, 4.0, 3);
  const auto s = kmeans(ds, 2, 1);
  const auto back = solution_from_json(nlohmann::json::parse(to_json(s).dump()));
  CHECK(back.assignment_for(ds) == s.assignment_for(ds));
  CHECK(back.inertia == s.inertia);
  CHECK(back.centroids == s.centroids);
  CHECK_THROWS_AS(solution_from_json(nlohmann::json::parse(R"({"k":2})")), ValidationError);
}
