#include "semtrace/wsd.hpp"

#include <algorithm>
#include <cmath>

#include "semtrace/error.hpp"
#include "semtrace/random.hpp"
#include "semtrace/vectormath.hpp"

namespace semtrace {

PrototypeSet build_prototypes(const Dataset& train, const LabelSubset& subset) {
  std::map<std::string, std::vector<VectorView>> members;
  for (const auto& r : train.records)
    if (r.label && subset.contains(*r.label)) members[*r.label].push_back(r.view());

  PrototypeSet set;
  set.subset = subset;
  for (const std::string& label : subset.labels) {
    auto it = members.find(label);
    if (it == members.end()) throw ValidationError("no training records for label \"" + label + "\"");
    set.prototypes[label] = mean_vector(it->second);
    set.support[label] = it->second.size();
  }
  return set;
}

std::string predict_1nn(std::span<const float> vector, const PrototypeSet& prototypes) {
  // subset.labels is in rank order, so a strict comparison keeps the
  // better-ranked label on ties.
  const std::string* best = nullptr;
  double best_cos = -2.0;
  for (const std::string& label : prototypes.subset.labels) {
    const auto& proto = prototypes.prototypes.at(label);
    const double c = cosine(vector, std::span<const double>(proto));
    if (c > best_cos) {
      best_cos = c;
      best = &label;
    }
  }
  if (!best) throw ValidationError("prototype set is empty");
  return *best;
}

EvalReport score_predictions(const std::vector<std::string>& labels, std::span<const std::size_t> gold,
                             std::span<const std::size_t> predicted) {
  if (gold.empty()) throw ValidationError("cannot evaluate an empty test set");
  if (gold.size() != predicted.size()) throw ValidationError("gold/predicted length mismatch");
  const std::size_t l = labels.size();
  EvalReport report;
  report.labels = labels;
  report.n = gold.size();
  report.confusion.assign(l, std::vector<std::size_t>(l, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) ++report.confusion.at(gold[i]).at(predicted[i]);

  for (std::size_t c = 0; c < l; ++c) {
    std::size_t support = 0;
    std::size_t predicted_count = 0;
    for (std::size_t j = 0; j < l; ++j) {
      support += report.confusion[c][j];
      predicted_count += report.confusion[j][c];
    }
    const auto tp = static_cast<double>(report.confusion[c][c]);
    LabelScore s;
    s.support = support;
    s.precision = predicted_count ? tp / static_cast<double>(predicted_count) : 0.0;
    s.recall = support ? tp / static_cast<double>(support) : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    report.per_label[labels[c]] = s;
    report.weighted_f1 += static_cast<double>(support) / static_cast<double>(report.n) * s.f1;
  }
  return report;
}

EvalReport evaluate(const Dataset& test, const PrototypeSet& prototypes) {
  const auto& labels = prototypes.subset.labels;
  std::vector<std::size_t> gold;
  std::vector<std::size_t> predicted;
  gold.reserve(test.size());
  predicted.reserve(test.size());
  auto index_of = [&](const std::string& label) {
    return static_cast<std::size_t>(prototypes.subset.rank_of.at(label) - 1);
  };
  for (const auto& r : test.records) {
    if (!r.label || !prototypes.subset.contains(*r.label))
      throw ValidationError("test record \"" + r.occurrence_id + "\" has no label in the subset");
    gold.push_back(index_of(*r.label));
    predicted.push_back(index_of(predict_1nn(r.view(), prototypes)));
  }
  return score_predictions(labels, gold, predicted);
}

TrainTestSplit stratified_split(const Dataset& dataset, const LabelSubset& subset, double train_fraction,
                                std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ValidationError("train fraction must lie in (0, 1)");
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& r = dataset.records[i];
    if (r.label && subset.contains(*r.label)) by_label[*r.label].push_back(i);
  }

  std::vector<bool> in_train(dataset.records.size(), false);
  for (const std::string& label : subset.labels) {
    auto& idx = by_label[label];
    Engine rng = make_stream(seed, "split/" + label);
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
    const auto n_train = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(idx.size()))));
    for (std::size_t i = 0; i < std::min(n_train, idx.size()); ++i) in_train[idx[i]] = true;
  }

  TrainTestSplit split;
  split.train.dim = split.test.dim = dataset.dim;
  split.train.source_path = split.test.source_path = dataset.source_path;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& r = dataset.records[i];
    if (!r.label || !subset.contains(*r.label)) continue;
    (in_train[i] ? split.train : split.test).records.push_back(r);
  }
  return split;
}

}  // namespace semtrace
