#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "semtrace/corpus.hpp"

namespace semtrace {

/// Non-owning view of one embedding.
using VectorView = std::span<const float>;

/// Views over every record vector of a dataset, in record order.
std::vector<VectorView> vector_views(const Dataset& dataset);

double dot(std::span<const float> a, std::span<const float> b);
double dot(std::span<const float> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);

/// Cosine similarity with 64-bit accumulation, clamped to [-1, 1].
/// Throws ValidationError on zero-norm input or a dimension mismatch.
double cosine(std::span<const float> a, std::span<const float> b);
double cosine(std::span<const float> a, std::span<const double> b);
double cosine(std::span<const double> a, std::span<const double> b);

/// Componentwise arithmetic mean. Throws ValidationError on an empty set.
std::vector<double> mean_vector(std::span<const VectorView> set);

/// Mean cosine over all |e1|*|e2| cross pairs.
///
/// Evaluated as the dot product of the two sums of unit vectors, which is
/// algebraically the mean of the cross-pair cosine matrix.
double aps(std::span<const VectorView> e1, std::span<const VectorView> e2);

/// Mean cosine over unordered distinct pairs; nullopt when |e| < 2.
///
/// Uses |sum u_i|^2 = sum_i |u_i|^2 + 2 sum_{i<j} u_i.u_j over unit vectors.
std::optional<double> ais(std::span<const VectorView> e);

/// Density summary of cosine similarities over random record pairs.
struct SimilaritySummary {
  double mean = 0.0;
  std::size_t n_pairs = 0;
  std::vector<double> bins;            // bin edges over [-1, 1], size = counts.size() + 1
  std::vector<std::uint64_t> counts;
  bool with_replacement = false;       // pool was smaller than the requested token count
};

inline constexpr std::size_t kIsotropyBins = 200;

/// Global isotropy probe: samples `n_tokens` records, shuffles them into
/// disjoint consecutive pairs and summarizes the first `n_pairs` cosines.
/// Sampling is without replacement when the dataset is large enough, with
/// replacement (never pairing a record with itself) otherwise.
SimilaritySummary acs_isotropy(const Dataset& dataset, std::size_t n_tokens, std::size_t n_pairs,
                               std::uint64_t seed);

}  // namespace semtrace
