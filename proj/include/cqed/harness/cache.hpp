#pragma once

// Content-addressed result cache: one JSON file per config hash.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace cqed::harness {

using Json = nlohmann::json;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

/// 16 lowercase hex digits of fnv1a(text).
std::string config_hash(std::string_view text);

/// READOUT_CACHE_DIR if set, else <output_dir>/.readout-cache.
std::filesystem::path default_cache_dir(const std::filesystem::path& output_dir);

class ResultCache {
public:
  /// A disabled cache never hits and never writes.
  explicit ResultCache(std::filesystem::path dir, bool enabled = true);

  bool enabled() const { return enabled_; }
  const std::filesystem::path& dir() const { return dir_; }

  std::optional<Json> load(const std::string& hash) const;

  /// Writes to a temporary file and renames it into place.
  void store(const std::string& hash, const Json& record) const;

private:
  std::filesystem::path dir_;
  bool enabled_;
};

/// ResultRecord envelope: hash, timestamp, engine version, payload, provenance.
Json make_record(const std::string& hash, const Json& payload, const Json& provenance);

/// Returns the cached payload for `canonical`, or computes, stores and
/// returns it.
template <typename Compute>
Json cached(const ResultCache& cache, const std::string& canonical, Compute&& compute) {
  const std::string hash = config_hash(canonical);
  if (auto hit = cache.load(hash)) {
    if (hit->contains("payload")) return (*hit)["payload"];
  }
  Json provenance = Json::object();
  Json payload = compute(provenance);
  cache.store(hash, make_record(hash, payload, provenance));
  return payload;
}

} // namespace cqed::harness
