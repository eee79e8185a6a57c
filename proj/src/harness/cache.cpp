#include "cqed/harness/cache.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace cqed::harness {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(std::string_view text) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(text);
  return os.str();
}

std::filesystem::path default_cache_dir(const std::filesystem::path& output_dir) {
  if (const char* env = std::getenv("READOUT_CACHE_DIR"); env && *env) return env;
  return output_dir / ".readout-cache";
}

ResultCache::ResultCache(std::filesystem::path dir, bool enabled)
    : dir_(std::move(dir)), enabled_(enabled) {}

std::optional<Json> ResultCache::load(const std::string& hash) const {
  if (!enabled_) return std::nullopt;
  std::ifstream in(dir_ / (hash + ".json"));
  if (!in) return std::nullopt;
  try {
    Json j = Json::parse(in);
    if (j.value("config_hash", "") != hash) return std::nullopt;
    return j;
  } catch (const Json::exception&) {
    return std::nullopt;
  }
}

void ResultCache::store(const std::string& hash, const Json& record) const {
  if (!enabled_) return;
  std::filesystem::create_directories(dir_);
  std::ostringstream tmp_name;
  tmp_name << hash << ".json.tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id());
  const auto tmp = dir_ / tmp_name.str();
  {
    std::ofstream out(tmp);
    out << record.dump(2) << "\n";
    if (!out) throw std::runtime_error("cache: cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, dir_ / (hash + ".json"));
}

Json make_record(const std::string& hash, const Json& payload, const Json& provenance) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::ostringstream ts;
  ts << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
  return Json{{"config_hash", hash},
              {"timestamp", ts.str()},
              {"engine_version", CQED_VERSION},
              {"payload", payload},
              {"provenance", provenance}};
}

} // namespace cqed::harness
