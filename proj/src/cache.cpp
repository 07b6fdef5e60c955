#include "elbptop/cache.hpp"

#include <bit>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "elbptop/error.hpp"

namespace elbptop {

namespace fs = std::filesystem;

namespace {

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

std::string sanitize(std::string_view id) {
  std::string out(id);
  for (char& c : out) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  }
  return out;
}

void write_atomic(const fs::path& path, const std::string& bytes) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ostringstream suffix;
  suffix << ".tmp" << std::hex << std::hash<std::thread::id>{}(std::this_thread::get_id());
  const fs::path tmp = path.string() + suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IngestError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

void write_record(const fs::path& path, const CacheRecord& record) {
  if (record.layout.find_first_of(" \n") != std::string::npos ||
      record.config_hash.find_first_of(" \n") != std::string::npos) {
    throw ConfigError("cache header fields must not contain spaces or newlines");
  }
  std::string bytes = "dims=" + std::to_string(record.values.size()) + " layout=" + record.layout +
                      " config_hash=" + record.config_hash + "\n";
  const std::size_t header = bytes.size();
  bytes.resize(header + 4 * record.values.size());
  for (std::size_t i = 0; i < record.values.size(); ++i) {
    const std::uint32_t bits = to_little(std::bit_cast<std::uint32_t>(record.values[i]));
    std::memcpy(bytes.data() + header + 4 * i, &bits, 4);
  }
  write_atomic(path, bytes);
}

CacheRecord read_record(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open cache record " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty cache record " + path.string());

  CacheRecord record;
  std::size_t dims = 0;
  bool have_dims = false;
  std::istringstream fields(line);
  std::string field;
  while (fields >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw IngestError("malformed cache header field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "dims") {
      dims = std::stoull(value);
      have_dims = true;
    } else if (key == "layout") {
      record.layout = value;
    } else if (key == "config_hash") {
      record.config_hash = value;
    }
  }
  if (!have_dims) throw IngestError("cache header lacks dims: " + path.string());

  std::vector<char> payload(4 * dims);
  in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size()) throw IngestError("truncated cache record " + path.string());
  record.values.resize(dims);
  for (std::size_t i = 0; i < dims; ++i) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, payload.data() + 4 * i, 4);
    record.values[i] = std::bit_cast<float>(to_little(bits));
  }
  return record;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

FeatureCache::FeatureCache(fs::path directory) : dir_(std::move(directory)) { fs::create_directories(dir_); }

fs::path FeatureCache::record_path(std::string_view clip_id, std::string_view config_hash) const {
  return dir_ / (sanitize(clip_id) + "__" + std::string(config_hash) + ".feat");
}

std::optional<std::vector<float>> FeatureCache::load(std::string_view clip_id, std::string_view config_hash,
                                                     std::string_view layout, std::size_t dims) const {
  const fs::path path = record_path(clip_id, config_hash);
  std::lock_guard lock(mutex_);
  if (!fs::exists(path)) return std::nullopt;

  const fs::path index_path = dir_ / "cache_index.json";
  if (fs::exists(index_path)) {
    std::ifstream in(index_path);
    const nlohmann::json index = nlohmann::json::parse(in, nullptr, false);
    const std::string key(config_hash);
    if (index.is_object() && index.contains(key) && index[key].value("layout", "") != layout) return std::nullopt;
  }

  CacheRecord record;
  try {
    record = read_record(path);
  } catch (const IngestError&) {
    return std::nullopt;
  }
  if (record.config_hash != config_hash || record.layout != layout || record.values.size() != dims) {
    return std::nullopt;
  }
  return std::move(record.values);
}

void FeatureCache::store(std::string_view clip_id, std::string_view config_hash, std::string_view layout,
                         const std::vector<float>& values) {
  std::lock_guard lock(mutex_);
  write_record(record_path(clip_id, config_hash), {std::string(layout), std::string(config_hash), values});

  const fs::path index_path = dir_ / "cache_index.json";
  nlohmann::json index = nlohmann::json::object();
  if (fs::exists(index_path)) {
    std::ifstream in(index_path);
    index = nlohmann::json::parse(in, nullptr, false);
    if (!index.is_object()) index = nlohmann::json::object();
  }
  const std::string key(config_hash);
  if (!index.contains(key) || index[key].value("layout", "") != layout) {
    index[key] = {{"layout", std::string(layout)}, {"dims", values.size()}};
    write_atomic(index_path, index.dump(2) + "\n");
  }
}

}  // namespace elbptop
