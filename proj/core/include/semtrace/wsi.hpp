#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "semtrace/corpus.hpp"

namespace semtrace {

enum class InitMethod { forgy, kmeans_plus_plus };

struct KMeansOptions {
  int max_iter = 300;
  double tol = 1e-6;  // on the largest centroid shift (Euclidean)
  InitMethod init = InitMethod::forgy;
};

/// Result of one Lloyd run (or the selected best of several).
struct ClusteringSolution {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> centroids;
  std::vector<std::string> occurrence_ids;  // record order of the clustered dataset
  std::vector<std::size_t> assignment;      // parallel to occurrence_ids
  double inertia = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Inertia after the initial assignment and after every Lloyd iteration.
  std::vector<double> inertia_trace;

  std::vector<std::size_t> sizes() const;

  /// Cluster index of every record of `dataset`, matched by occurrence_id.
  /// Throws ValidationError if a record is not covered by the solution.
  std::vector<std::size_t> assignment_for(const Dataset& dataset) const;
};

/// Lloyd's algorithm on squared Euclidean distance over the raw vectors.
///
/// Stops when the assignment reaches a fixed point, the largest centroid
/// shift drops below tol, or max_iter iterations ran. Empty clusters are
/// reseeded at the point farthest from its centroid (taken from a cluster
/// with at least two members), so every cluster ends non-empty.
ClusteringSolution kmeans(const Dataset& records, std::size_t k, std::uint64_t seed,
                          const KMeansOptions& options = {});

struct RestartResult {
  ClusteringSolution best;
  std::uint64_t base_seed = 0;
  std::vector<double> restart_inertia;  // indexed by seed - base_seed
};

/// Runs kmeans for seeds base_seed .. base_seed + n_restarts - 1 (concurrently)
/// and keeps the lowest-inertia solution; ties go to the lowest seed.
RestartResult best_of(const Dataset& records, std::size_t k, std::size_t n_restarts, std::uint64_t base_seed,
                      const KMeansOptions& options = {}, unsigned threads = 0);

/// Lowercased stop-word set loaded from a one-word-per-line file
/// ('#' starts a comment).
class StopWords {
 public:
  StopWords() = default;
  explicit StopWords(std::set<std::string> words) : words_(std::move(words)) {}

  static StopWords load(const std::filesystem::path& path);

  bool contains(const std::string& word) const { return words_.contains(word); }
  std::size_t size() const { return words_.size(); }

 private:
  std::set<std::string> words_;
};

struct NeighborCount {
  std::string word;
  std::size_t count = 0;
};

struct ClusterProfile {
  std::size_t cluster = 0;
  std::size_t size = 0;
  std::optional<std::string> dominant_label;
  std::optional<int> dominant_rank;
  std::vector<NeighborCount> top_neighbors;
  std::optional<double> ais;  // nullopt: fewer than two members
};

/// Profiles in cluster-index order. Dominant label is the mode among labeled
/// members (ties: better rank in `rank_of`, then lexicographic); neighbors
/// are the most frequent non-stop-word context tokens.
std::vector<ClusterProfile> profile_clusters(const ClusteringSolution& solution, const Dataset& records,
                                             const std::map<std::string, int>& rank_of,
                                             const StopWords& stop_words, std::size_t n_neighbors = 6);

/// Dominant-label ranks of the clusters sorted by size (descending, ties by
/// cluster index); "?" marks a cluster without a ranked dominant label.
std::string permutation_string(std::span<const ClusterProfile> profiles);

/// Cluster indices ordered by size descending, ties by index.
std::vector<std::size_t> order_by_size(std::span<const std::size_t> sizes);

/// Cohesion/separation matrix: AIS on the diagonal, APS off it.
struct Heatmap {
  std::vector<std::size_t> order;             // cluster index of each row/column
  std::vector<std::size_t> sizes;             // in `order`
  std::vector<std::vector<double>> matrix;    // NaN where AIS is undefined
  std::vector<bool> insufficient;             // per row: AIS undefined
  std::optional<double> mean_ais_minus_aps;   // over clusters with defined AIS
};

Heatmap heatmap_data(const ClusteringSolution& solution, const Dataset& records);

}  // namespace semtrace
