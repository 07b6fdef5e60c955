#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace elbptop {

// One cached vector: a UTF-8 header line
//   dims=<n> layout=<token> config_hash=<hex>\n
// followed by n little-endian IEEE-754 32-bit floats.
struct CacheRecord {
  std::string layout;
  std::string config_hash;
  std::vector<float> values;
};

// Writes through a temporary file and renames it into place.
void write_record(const std::filesystem::path& path, const CacheRecord& record);
// Throws IngestError on a malformed header or truncated payload.
CacheRecord read_record(const std::filesystem::path& path);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

// Directory of per-(clip, config hash) records plus a JSON sidecar
// (cache_index.json) mapping each config hash to the layout it produced.
// Safe for concurrent use within a process.
class FeatureCache {
 public:
  explicit FeatureCache(std::filesystem::path directory);

  const std::filesystem::path& directory() const { return dir_; }
  std::filesystem::path record_path(std::string_view clip_id, std::string_view config_hash) const;

  // nullopt when the record is missing, carries another hash, has the wrong
  // size, or the sidecar disagrees about the layout (stale entry).
  std::optional<std::vector<float>> load(std::string_view clip_id, std::string_view config_hash,
                                         std::string_view layout, std::size_t dims) const;
  void store(std::string_view clip_id, std::string_view config_hash, std::string_view layout,
             const std::vector<float>& values);

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

// Environment variable that overrides the configured cache directory.
inline constexpr const char* kCacheDirEnv = "ELBPTOP_CACHE_DIR";

}  // namespace elbptop
