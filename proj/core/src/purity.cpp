#include "semtrace/purity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semtrace/error.hpp"

namespace semtrace {

double cluster_cv(std::span<const std::size_t> counts, Dispersion dispersion) {
  const std::size_t l = counts.size();
  if (l < 2) throw ValidationError("CV needs at least 2 labels");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t c : counts) {
    const auto x = static_cast<double>(c);
    sum += x;
    sum_sq += x * x;
  }
  if (sum == 0.0) throw ValidationError("CV of an all-zero label distribution");
  // Scale-free form of (sigma/mu)^2 = l * sum(c^2) / sum(c)^2 - 1, exact on
  // integer counts, so every single-label cluster gives the same value as TM.
  const auto ld = static_cast<double>(l);
  double cv2 = std::max(0.0, ld * sum_sq / (sum * sum) - 1.0);
  if (dispersion == Dispersion::sample) cv2 *= ld / (ld - 1.0);
  return std::sqrt(cv2);
}

double theoretical_max(std::size_t l, Dispersion dispersion) {
  if (l < 2) throw ValidationError("theoretical maximum needs l >= 2");
  std::vector<std::size_t> pure(l, 0);
  pure[0] = 1;
  return cluster_cv(pure, dispersion);
}

PurityReport purity_from_distributions(const std::vector<std::vector<std::size_t>>& distributions, std::size_t l,
                                       Dispersion dispersion) {
  if (distributions.empty()) throw ValidationError("purity of an empty clustering");
  PurityReport rep;
  rep.dispersion = dispersion;
  rep.distributions = distributions;
  rep.tm = theoretical_max(l, dispersion);

  double total = 0.0;
  double normalized = 0.0;
  for (const auto& d : distributions) {
    if (d.size() != l) throw ValidationError("label distribution length differs from l");
    total += static_cast<double>(std::accumulate(d.begin(), d.end(), std::size_t{0}));
  }
  for (const auto& d : distributions) {
    const double size = static_cast<double>(std::accumulate(d.begin(), d.end(), std::size_t{0}));
    if (size == 0.0) throw ValidationError("purity requires non-empty clusters");
    const double w = size / total;
    const double cv = cluster_cv(d, dispersion);
    rep.weights.push_back(w);
    rep.per_cluster_cv.push_back(cv);
    rep.wa_cv += w * cv;
    normalized += size * (cv / rep.tm);
  }
  // Weighting the per-cluster ratios by integer sizes keeps an all-pure
  // clustering at exactly 1.
  rep.purity = normalized / total;
  return rep;
}

PurityReport purity_score(const ClusteringSolution& solution, const Dataset& records, const LabelSubset& subset,
                          Dispersion dispersion) {
  const std::size_t l = subset.k();
  if (l < 2) throw ValidationError("purity needs a label subset with l >= 2");
  const auto assignment = solution.assignment_for(records);
  std::vector<std::vector<std::size_t>> dist(solution.k, std::vector<std::size_t>(l, 0));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records.records[i];
    if (!r.label || !subset.contains(*r.label))
      throw ValidationError("record \"" + r.occurrence_id + "\" has no label in the subset");
    ++dist[assignment[i]][static_cast<std::size_t>(subset.rank_of.at(*r.label) - 1)];
  }

  PurityReport rep = purity_from_distributions(dist, l, dispersion);

  // Dominant label per cluster: highest count, ties to the better rank
  // (lower index, since distributions are in rank order).
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> dominant;
  for (const auto& d : dist) {
    sizes.push_back(std::accumulate(d.begin(), d.end(), std::size_t{0}));
    std::size_t best = 0;
    for (std::size_t j = 1; j < l; ++j)
      if (d[j] > d[best]) best = j;
    dominant.push_back(best + 1);
  }
  for (std::size_t c : order_by_size(sizes)) rep.permutation += std::to_string(dominant[c]);
  return rep;
}

}  // namespace semtrace
