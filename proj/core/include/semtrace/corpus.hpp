#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace semtrace {

/// One occurrence of the target term together with its embedding.
struct EmbeddingRecord {
  std::string occurrence_id;
  std::string term;
  std::vector<float> vector;
  std::string corpus_id;
  std::string paragraph_id;
  std::optional<int> year;
  std::optional<std::string> label;
  std::optional<std::vector<std::string>> context_tokens;

  std::span<const float> view() const { return vector; }

  bool operator==(const EmbeddingRecord&) const = default;
};

/// Dataset-level sidecar header, stored next to the JSONL file.
struct DatasetHeader {
  std::size_t dim = 0;
  std::string corpus_id;
};

/// A validated, immutable collection of records sharing one dimension.
///
/// load_dataset() guarantees a non-empty result; filtered views may be empty
/// and report it through empty().
struct Dataset {
  std::vector<EmbeddingRecord> records;
  std::size_t dim = 0;
  std::string source_path;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  bool operator==(const Dataset& other) const {
    return dim == other.dim && records == other.records;
  }
};

/// The k most frequent labels of a dataset, rank 1 = most frequent.
struct LabelSubset {
  std::vector<std::string> labels;
  std::map<std::string, int> rank_of;

  std::size_t k() const { return labels.size(); }
  bool contains(const std::string& label) const { return rank_of.contains(label); }
};

struct YearRange {
  int first;
  int last;

  bool contains(int year) const { return year >= first && year <= last; }
};

/// Sidecar header path: "x.jsonl" -> "x.header.json".
std::filesystem::path header_path_for(const std::filesystem::path& dataset_path);

/// Loads and validates a JSONL dataset. When a sidecar header exists its
/// declared dim is enforced; otherwise the first record fixes the dimension.
/// Throws IoError if the file cannot be read, ValidationError (with the
/// offending line number) on any schema or invariant violation.
Dataset load_dataset(const std::filesystem::path& path,
                     std::optional<std::size_t> expected_dim = std::nullopt);

/// Parses JSONL from a stream. `source` is used in error messages only.
Dataset parse_dataset(std::istream& in, const std::string& source,
                      std::optional<std::size_t> expected_dim = std::nullopt);

/// Writes records as JSONL plus the sidecar header.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
void write_jsonl(const Dataset& dataset, std::ostream& out);

/// (label, count) for every labeled record, by count descending and then
/// lexicographically.
std::vector<std::pair<std::string, std::size_t>> label_counts(const Dataset& dataset);

/// Frequency ranks for every distinct label in the dataset.
std::map<std::string, int> label_ranks(const Dataset& dataset);

LabelSubset build_label_subset(const Dataset& dataset, std::size_t k);

/// Keeps records whose label is in `subset` and whose year lies in `years`.
/// With a subset, unlabeled records are dropped; with a year range, undated
/// records are dropped. The result may be empty.
Dataset filter_records(const Dataset& dataset, const LabelSubset* subset,
                       std::optional<YearRange> years = std::nullopt);

}  // namespace semtrace
