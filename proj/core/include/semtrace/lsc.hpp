#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "semtrace/corpus.hpp"
#include "semtrace/vectormath.hpp"
#include "semtrace/wsi.hpp"

namespace semtrace {

/// Per-year cluster frequencies for the years present in the data.
struct YearSeries {
  std::size_t k = 0;
  std::vector<int> years;                        // strictly increasing
  std::vector<std::vector<std::size_t>> counts;  // [year][cluster]
  std::vector<std::size_t> totals;               // occurrences per year
  std::vector<std::vector<double>> norm_freq;    // counts / totals
  std::size_t undated = 0;                       // records without a year
};

YearSeries year_series(const Dataset& records, const ClusteringSolution& solution);

enum class LogBase { two, natural };

/// Jensen-Shannon divergence; in [0, 1] with base-2 logarithms.
/// Inputs must be non-negative and sum to 1 within 1e-9.
double jsd(std::span<const double> d1, std::span<const double> d2, LogBase base = LogBase::two);

/// 1 - cosine between the mean vectors of two years. nullopt when either
/// mean has zero norm. Throws ValidationError on an empty year.
std::optional<double> cdpt(std::span<const VectorView> year_a, std::span<const VectorView> year_b);

struct ChangePoint {
  int year_from = 0;
  int year_to = 0;
  double jsd = 0.0;
  std::optional<double> cdpt;
  std::size_t n_left = 0;
  std::size_t n_right = 0;
  bool gap = false;  // year_to - year_from > 1
};

struct ChangeSeries {
  std::vector<ChangePoint> points;
};

/// JSD and CDPT for every pair of consecutive years present in the data.
ChangeSeries change_series(const Dataset& records, const ClusteringSolution& solution,
                           LogBase base = LogBase::two);

}  // namespace semtrace
