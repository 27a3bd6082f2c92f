#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "semtrace/corpus.hpp"

namespace semtrace {

/// Per-label mean embeddings used by the nearest-prototype classifier.
struct PrototypeSet {
  LabelSubset subset;
  std::map<std::string, std::vector<double>> prototypes;
  std::map<std::string, std::size_t> support;
};

struct LabelScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  std::vector<std::string> labels;  // subset order; indexes the confusion matrix
  std::map<std::string, LabelScore> per_label;
  double weighted_f1 = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // [gold][predicted]
  std::size_t n = 0;
};

/// Mean vector of each subset label's records. Records outside the subset are
/// ignored; a subset label without records is an error.
PrototypeSet build_prototypes(const Dataset& train, const LabelSubset& subset);

/// Label of the prototype with the highest cosine similarity. Exact ties go
/// to the label with the better frequency rank.
std::string predict_1nn(std::span<const float> vector, const PrototypeSet& prototypes);

EvalReport evaluate(const Dataset& test, const PrototypeSet& prototypes);

/// Builds an EvalReport from gold/predicted label indices into `labels`.
EvalReport score_predictions(const std::vector<std::string>& labels, std::span<const std::size_t> gold,
                             std::span<const std::size_t> predicted);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

/// Deterministic per-label split: floor(train_fraction * n) records of each
/// label (at least one) go to train, the rest to test.
TrainTestSplit stratified_split(const Dataset& dataset, const LabelSubset& subset, double train_fraction,
                                std::uint64_t seed);

}  // namespace semtrace
