#include "semtrace/lsc.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "semtrace/error.hpp"

namespace semtrace {
namespace {

void check_distribution(std::span<const double> d) {
  double sum = 0.0;
  for (double x : d) {
    if (!(x >= 0.0)) throw ValidationError("distribution has a negative or non-finite entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("distribution does not sum to 1");
}

double kl_to_mixture(std::span<const double> p, std::span<const double> m, LogBase base) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    const double ratio = p[i] / m[i];
    s += p[i] * (base == LogBase::two ? std::log2(ratio) : std::log(ratio));
  }
  return s;
}

}  // namespace

YearSeries year_series(const Dataset& records, const ClusteringSolution& solution) {
  const auto assignment = solution.assignment_for(records);
  std::map<int, std::vector<std::size_t>> buckets;
  YearSeries ys;
  ys.k = solution.k;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& year = records.records[i].year;
    if (!year) {
      ++ys.undated;
      continue;
    }
    auto& row = buckets[*year];
    row.resize(solution.k, 0);
    ++row[assignment[i]];
  }
  if (buckets.empty()) throw ValidationError("no dated records");
  for (auto& [year, row] : buckets) {
    const std::size_t total = std::accumulate(row.begin(), row.end(), std::size_t{0});
    std::vector<double> freq(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) freq[c] = static_cast<double>(row[c]) / static_cast<double>(total);
    ys.years.push_back(year);
    ys.totals.push_back(total);
    ys.counts.push_back(std::move(row));
    ys.norm_freq.push_back(std::move(freq));
  }
  return ys;
}

double jsd(std::span<const double> d1, std::span<const double> d2, LogBase base) {
  if (d1.size() != d2.size()) throw ValidationError("JSD inputs differ in length");
  check_distribution(d1);
  check_distribution(d2);
  std::vector<double> m(d1.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (d1[i] + d2[i]);
  const double v = 0.5 * (kl_to_mixture(d1, m, base) + kl_to_mixture(d2, m, base));
  return std::max(0.0, v);
}

std::optional<double> cdpt(std::span<const VectorView> year_a, std::span<const VectorView> year_b) {
  if (year_a.empty() || year_b.empty()) throw ValidationError("CDPT needs records on both sides");
  const auto pa = mean_vector(year_a);
  const auto pb = mean_vector(year_b);
  const std::span<const double> a(pa);
  const std::span<const double> b(pb);
  if (dot(a, a) == 0.0 || dot(b, b) == 0.0) return std::nullopt;
  return 1.0 - cosine(a, b);
}

ChangeSeries change_series(const Dataset& records, const ClusteringSolution& solution, LogBase base) {
  const YearSeries ys = year_series(records, solution);
  if (ys.years.size() < 2) throw ValidationError("change series needs at least 2 years with data");

  std::map<int, std::vector<VectorView>> by_year;
  for (const auto& r : records.records)
    if (r.year) by_year[*r.year].push_back(r.view());

  ChangeSeries out;
  for (std::size_t t = 0; t + 1 < ys.years.size(); ++t) {
    ChangePoint p;
    p.year_from = ys.years[t];
    p.year_to = ys.years[t + 1];
    p.n_left = ys.totals[t];
    p.n_right = ys.totals[t + 1];
    p.gap = p.year_to - p.year_from > 1;
    p.jsd = jsd(ys.norm_freq[t], ys.norm_freq[t + 1], base);
    p.cdpt = cdpt(by_year.at(p.year_from), by_year.at(p.year_to));
    out.points.push_back(p);
  }
  return out;
}

}  // namespace semtrace
