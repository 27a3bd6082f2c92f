#include "manifest.hpp"

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "semtrace/corpus.hpp"
#include "semtrace/error.hpp"

#ifndef SEMTRACE_VERSION
#define SEMTRACE_VERSION "dev"
#endif

namespace semtrace::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in.read(buf.data(), buf.size()) || in.gcount() > 0)
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

void RunManifest::add_dataset(const std::string& name, const std::filesystem::path& path) {
  nlohmann::json entry{{"path", path.string()}, {"sha256", sha256_file(path)}};
  const auto header = header_path_for(path);
  entry["header_sha256"] = std::filesystem::exists(header) ? nlohmann::json(sha256_file(header)) : nlohmann::json();
  inputs[name] = entry;
}

void RunManifest::add_input(const std::string& name, const std::filesystem::path& path) {
  inputs[name] = {{"path", path.string()}, {"sha256", sha256_file(path)}};
}

void RunManifest::add_output(const std::string& name, const std::filesystem::path& path) {
  outputs[name] = {{"path", path.string()}, {"sha256", sha256_file(path)}};
}

nlohmann::json RunManifest::to_json() const {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  nlohmann::json j{{"subcommand", subcommand},
                   {"flags", flags},
                   {"inputs", inputs},
                   {"outputs", outputs},
                   {"seeds", seeds},
                   {"tool_version", SEMTRACE_VERSION},
                   {"timestamp", stamp}};
  j["stopwords_sha256"] = stopwords_sha256.empty() ? nlohmann::json() : nlohmann::json(stopwords_sha256);
  return j;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& output) {
  const auto path = manifest_path_for(output);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << manifest.to_json().dump(2) << '\n';
}

}  // namespace semtrace::cli
