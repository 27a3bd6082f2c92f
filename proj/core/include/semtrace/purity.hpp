#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "semtrace/corpus.hpp"
#include "semtrace/wsi.hpp"

namespace semtrace {

/// Standard deviation convention for the coefficient of variation.
/// Population (divide by l) makes the pure-cluster maximum exactly sqrt(l-1).
enum class Dispersion { population, sample };

/// Coefficient of variation (sigma / mu) of one cluster's label counts.
/// `counts` has one entry per subset label, zeros included.
double cluster_cv(std::span<const std::size_t> counts, Dispersion dispersion = Dispersion::population);

/// CV of the single-label distribution (1, 0, ..., 0) of length l.
double theoretical_max(std::size_t l, Dispersion dispersion = Dispersion::population);

struct PurityReport {
  std::vector<std::vector<std::size_t>> distributions;  // per cluster, subset label order
  std::vector<double> per_cluster_cv;
  std::vector<double> weights;  // cluster size / total records
  double wa_cv = 0.0;
  double tm = 0.0;
  double purity = 0.0;
  std::string permutation;
  Dispersion dispersion = Dispersion::population;
};

/// Purity from per-cluster label distributions (each of length l).
PurityReport purity_from_distributions(const std::vector<std::vector<std::size_t>>& distributions, std::size_t l,
                                       Dispersion dispersion = Dispersion::population);

/// Size-weighted mean cluster CV divided by its pure-clustering maximum.
/// Every record must carry a subset label and every cluster must be non-empty.
PurityReport purity_score(const ClusteringSolution& solution, const Dataset& records, const LabelSubset& subset,
                          Dispersion dispersion = Dispersion::population);

}  // namespace semtrace
