#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace semtrace::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Everything needed to reproduce one subcommand invocation.
struct RunManifest {
  std::string subcommand;
  nlohmann::json flags = nlohmann::json::object();
  nlohmann::json inputs = nlohmann::json::object();   // name -> {path, sha256[, header_sha256]}
  nlohmann::json outputs = nlohmann::json::object();  // name -> {path, sha256}
  std::string stopwords_sha256;
  std::map<std::string, std::uint64_t> seeds;

  void add_dataset(const std::string& name, const std::filesystem::path& path);
  void add_input(const std::string& name, const std::filesystem::path& path);
  void add_output(const std::string& name, const std::filesystem::path& path);

  /// Serialized with tool version and a UTC timestamp.
  nlohmann::json to_json() const;
};

/// `<out>.manifest.json`
std::filesystem::path manifest_path_for(const std::filesystem::path& output);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& output);

}  // namespace semtrace::cli
