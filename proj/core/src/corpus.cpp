#include "semtrace/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "semtrace/error.hpp"

namespace semtrace {
namespace {

using nlohmann::json;

[[noreturn]] void fail_line(const std::string& source, std::size_t line, const std::string& what) {
  throw ValidationError(source + ":" + std::to_string(line) + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& source, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) fail_line(source, line, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& source,
                           std::size_t line) {
  const json& v = require(obj, key, source, line);
  if (!v.is_string()) fail_line(source, line, std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

// Absent and null both mean "not provided".
const json* optional_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

EmbeddingRecord parse_record(const json& obj, const std::string& source, std::size_t line) {
  if (!obj.is_object()) fail_line(source, line, "record must be a JSON object");
  EmbeddingRecord rec;
  rec.occurrence_id = require_string(obj, "occurrence_id", source, line);
  rec.term = require_string(obj, "term", source, line);
  rec.corpus_id = require_string(obj, "corpus_id", source, line);
  rec.paragraph_id = require_string(obj, "paragraph_id", source, line);

  const json& vec = require(obj, "vector", source, line);
  if (!vec.is_array()) fail_line(source, line, "field \"vector\" must be an array of numbers");
  rec.vector.reserve(vec.size());
  double norm2 = 0.0;
  for (const json& x : vec) {
    if (!x.is_number()) fail_line(source, line, "field \"vector\" must be an array of numbers");
    const float f = static_cast<float>(x.get<double>());
    if (!std::isfinite(f)) fail_line(source, line, "non-finite vector component");
    norm2 += static_cast<double>(f) * f;
    rec.vector.push_back(f);
  }
  if (rec.vector.empty()) fail_line(source, line, "empty vector");
  if (norm2 == 0.0) fail_line(source, line, "zero-norm vector rejected");

  if (const json* y = optional_field(obj, "year")) {
    if (!y->is_number_integer()) fail_line(source, line, "field \"year\" must be an integer or null");
    rec.year = y->get<int>();
  }
  if (const json* l = optional_field(obj, "label")) {
    if (!l->is_string()) fail_line(source, line, "field \"label\" must be a string or null");
    rec.label = l->get<std::string>();
  }
  if (const json* ctx = optional_field(obj, "context_tokens")) {
    if (!ctx->is_array()) fail_line(source, line, "field \"context_tokens\" must be an array or null");
    std::vector<std::string> tokens;
    tokens.reserve(ctx->size());
    for (const json& t : *ctx) {
      if (!t.is_string()) fail_line(source, line, "field \"context_tokens\" must hold strings");
      tokens.push_back(t.get<std::string>());
    }
    rec.context_tokens = std::move(tokens);
  }
  return rec;
}

std::optional<DatasetHeader> read_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": malformed header: " + e.what());
  }
  if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() == 0)
    throw ValidationError(path.string() + ": header must declare a positive integer \"dim\"");
  DatasetHeader h;
  h.dim = j["dim"].get<std::size_t>();
  if (j.contains("corpus_id") && j["corpus_id"].is_string()) h.corpus_id = j["corpus_id"].get<std::string>();
  return h;
}

}  // namespace

std::filesystem::path header_path_for(const std::filesystem::path& dataset_path) {
  std::filesystem::path p = dataset_path;
  p.replace_extension(".header.json");
  return p;
}

Dataset parse_dataset(std::istream& in, const std::string& source, std::optional<std::size_t> expected_dim) {
  Dataset ds;
  ds.source_path = source;
  std::unordered_map<std::string, std::size_t> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::exception& e) {
      fail_line(source, line, std::string("malformed JSON: ") + e.what());
    }
    EmbeddingRecord rec = parse_record(obj, source, line);

    if (!expected_dim) expected_dim = rec.vector.size();
    if (rec.vector.size() != *expected_dim)
      fail_line(source, line,
                "dimension mismatch: expected " + std::to_string(*expected_dim) + ", got " +
                    std::to_string(rec.vector.size()));

    auto [it, inserted] = seen.emplace(rec.occurrence_id, line);
    if (!inserted)
      fail_line(source, line,
                "duplicate occurrence_id \"" + rec.occurrence_id + "\" (first seen on line " +
                    std::to_string(it->second) + ")");
    ds.records.push_back(std::move(rec));
  }
  if (in.bad()) throw IoError(source + ": read error");
  if (ds.records.empty()) throw ValidationError(source + ": dataset contains no records");
  ds.dim = *expected_dim;
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  if (auto header = read_header(header_path_for(path))) {
    if (expected_dim && *expected_dim != header->dim)
      throw ValidationError(path.string() + ": header declares dim " + std::to_string(header->dim) +
                            " but " + std::to_string(*expected_dim) + " was expected");
    expected_dim = header->dim;
  }
  return parse_dataset(in, path.string(), expected_dim);
}

void write_jsonl(const Dataset& dataset, std::ostream& out) {
  for (const EmbeddingRecord& r : dataset.records) {
    json j;
    j["occurrence_id"] = r.occurrence_id;
    j["term"] = r.term;
    j["vector"] = r.vector;
    j["corpus_id"] = r.corpus_id;
    j["paragraph_id"] = r.paragraph_id;
    j["year"] = r.year ? json(*r.year) : json(nullptr);
    j["label"] = r.label ? json(*r.label) : json(nullptr);
    j["context_tokens"] = r.context_tokens ? json(*r.context_tokens) : json(nullptr);
    out << j.dump() << '\n';
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset " + path.string());
  write_jsonl(dataset, out);
  std::ofstream header(header_path_for(path));
  if (!header) throw IoError("cannot write dataset header for " + path.string());
  json h;
  h["dim"] = dataset.dim;
  h["corpus_id"] = dataset.records.empty() ? std::string() : dataset.records.front().corpus_id;
  header << h.dump(2) << '\n';
  if (!out || !header) throw IoError("write failed for " + path.string());
}

std::vector<std::pair<std::string, std::size_t>> label_counts(const Dataset& dataset) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : dataset.records)
    if (r.label) ++counts[*r.label];
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

std::map<std::string, int> label_ranks(const Dataset& dataset) {
  std::map<std::string, int> ranks;
  int rank = 0;
  for (const auto& [label, count] : label_counts(dataset)) ranks[label] = ++rank;
  return ranks;
}

LabelSubset build_label_subset(const Dataset& dataset, std::size_t k) {
  if (k < 2) throw ValidationError("label subset needs k >= 2, got " + std::to_string(k));
  const auto counts = label_counts(dataset);
  if (counts.size() < k)
    throw ValidationError("requested " + std::to_string(k) + " labels but dataset has only " +
                          std::to_string(counts.size()) + " distinct labels");
  LabelSubset subset;
  for (std::size_t i = 0; i < k; ++i) {
    subset.labels.push_back(counts[i].first);
    subset.rank_of[counts[i].first] = static_cast<int>(i + 1);
  }
  return subset;
}

Dataset filter_records(const Dataset& dataset, const LabelSubset* subset, std::optional<YearRange> years) {
  Dataset out;
  out.dim = dataset.dim;
  out.source_path = dataset.source_path;
  for (const auto& r : dataset.records) {
    if (subset && (!r.label || !subset->contains(*r.label))) continue;
    if (years && (!r.year || !years->contains(*r.year))) continue;
    out.records.push_back(r);
  }
  return out;
}

}  // namespace semtrace
