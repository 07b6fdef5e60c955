#include "elbptop/config.hpp"

#include <fstream>
#include <set>

#include "elbptop/cache.hpp"
#include "elbptop/error.hpp"
#include "elbptop/protocol.hpp"

namespace elbptop {

using nlohmann::json;

namespace {

// Feature records change meaning if this does.
constexpr int kFeatureFormat = 1;

void check_keys(const json& value, std::string_view where, std::initializer_list<const char*> allowed) {
  if (!value.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : value.items()) {
    if (!keys.count(key)) throw ConfigError("unknown field '" + key + "' in " + std::string(where));
  }
}

template <class T>
T get_or(const json& value, const char* key, T fallback) {
  if (!value.contains(key)) return fallback;
  try {
    return value.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

json descriptor_to_json(const DescriptorConfig& c) {
  return {{"kind", std::string(to_string(c.kind))},
          {"radius", c.neighbors.radius},
          {"points", c.neighbors.points},
          {"delta", c.neighbors.delta},
          {"encoding", std::string(to_string(c.encoding))},
          {"planes", c.planes.name()},
          {"blocks", {c.grid.m, c.grid.q, c.grid.l}}};
}

DescriptorConfig descriptor_from_json(const json& v) {
  check_keys(v, "descriptor", {"kind", "radius", "points", "delta", "encoding", "planes", "blocks"});
  DescriptorConfig c;
  c.kind = parse_code_kind(get_or<std::string>(v, "kind", "lbp"));
  c.neighbors.radius = get_or(v, "radius", 1.0);
  c.neighbors.points = get_or(v, "points", 8);
  c.neighbors.delta = get_or(v, "delta", c.kind == CodeKind::kRdlbp ? 1.0 : 0.0);
  c.encoding = parse_encoding(get_or<std::string>(v, "encoding", "full"));
  c.planes = PlaneSet::parse(get_or<std::string>(v, "planes", "TOP"));
  const auto blocks = get_or<std::vector<int>>(v, "blocks", {8, 8, 2});
  if (blocks.size() != 3) throw ConfigError("blocks must list three counts (m, q, l)");
  c.grid = {blocks[0], blocks[1], blocks[2]};
  c.validate();
  return c;
}

json evm_to_json(const EvmParams& p) {
  return {{"alpha", p.alpha},         {"freq_low", p.freq_low}, {"freq_high", p.freq_high},
          {"unit", std::string(to_string(p.unit))}, {"frame_rate", p.frame_rate},
          {"lambda_c", p.lambda_c},   {"levels", p.levels}};
}

EvmParams evm_from_json(const json& v) {
  check_keys(v, "evm", {"alpha", "freq_low", "freq_high", "unit", "frame_rate", "lambda_c", "levels"});
  EvmParams p;
  p.alpha = get_or(v, "alpha", p.alpha);
  p.freq_low = get_or(v, "freq_low", p.freq_low);
  p.freq_high = get_or(v, "freq_high", p.freq_high);
  p.unit = parse_frequency_unit(get_or<std::string>(v, "unit", "cycles_per_frame"));
  p.frame_rate = get_or(v, "frame_rate", p.frame_rate);
  p.lambda_c = get_or(v, "lambda_c", p.lambda_c);
  p.levels = get_or(v, "levels", p.levels);
  p.validate();
  return p;
}

void RunConfig::validate() const {
  if (descriptors.empty()) throw ConfigError("at least one descriptor is required");
  for (const auto& d : descriptors) d.validate();
  if (frame_width < 1 || frame_height < 1) throw ConfigError("frame size must be positive");
  if (evm) evm->validate();
  if (tim && tim->target_length < 2) throw ConfigError("TIM target length must be at least 2");
  if (wpca.components < 0) throw ConfigError("WPCA components must be >= 0");
  if (protocol != "loso") parse_composite_protocol(protocol);
  if (c_grid.empty()) throw ConfigError("penalty grid is empty");
  for (double c : c_grid) {
    if (!(c > 0.0)) throw ConfigError("penalty grid values must be positive");
  }
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

std::string RunConfig::feature_hash(std::size_t descriptor) const {
  const json key = {{"format", kFeatureFormat},
                    {"descriptor", descriptor_to_json(descriptors.at(descriptor))},
                    {"frame_size", {frame_width, frame_height}},
                    {"evm", evm ? evm_to_json(*evm) : json(nullptr)},
                    {"tim", tim ? json{{"target_length", tim->target_length}} : json(nullptr)}};
  return fnv1a_hex(key.dump());
}

RunConfig default_config() {
  RunConfig c;
  DescriptorConfig lbp;
  lbp.kind = CodeKind::kLbp;
  lbp.neighbors = {1.0, 8, 0.0};
  lbp.grid = {8, 8, 2};
  DescriptorConfig ad = lbp;
  ad.kind = CodeKind::kAdlbp;
  DescriptorConfig rd = lbp;
  rd.kind = CodeKind::kRdlbp;
  rd.neighbors = {2.0, 8, 1.0};
  c.descriptors = {lbp, ad, rd};
  c.evm = EvmParams{};
  c.tim = TimParams{};
  c.c_grid = default_c_grid();
  return c;
}

RunConfig preset(std::string_view name) {
  RunConfig c = default_config();
  if (name == "default" || name == "casme2") return c;
  if (name == "samm") {
    for (auto& d : c.descriptors) d.grid = {5, 5, 2};
    return c;
  }
  if (name == "smic") {
    c.evm->alpha = 8.0;
    return c;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

json config_to_json(const RunConfig& c) {
  json descriptors = json::array();
  for (const auto& d : c.descriptors) descriptors.push_back(descriptor_to_json(d));
  return {{"descriptors", descriptors},
          {"frame_size", {c.frame_width, c.frame_height}},
          {"evm", c.evm ? evm_to_json(*c.evm) : json(nullptr)},
          {"tim", c.tim ? json{{"target_length", c.tim->target_length}} : json(nullptr)},
          {"wpca", {{"enabled", c.wpca.enabled}, {"components", c.wpca.components}, {"transductive", c.wpca.transductive}}},
          {"fusion_normalize", c.fusion_normalize},
          {"standardize", c.standardize},
          {"protocol", c.protocol},
          {"c_grid", c.c_grid},
          {"seed", c.seed},
          {"cache_dir", c.cache_dir},
          {"threads", c.threads}};
}

RunConfig config_from_json(const json& v) {
  check_keys(v, "config", {"preset", "descriptors", "frame_size", "evm", "tim", "wpca", "fusion_normalize",
                           "standardize", "protocol", "c_grid", "seed", "cache_dir", "threads"});
  RunConfig c = preset(get_or<std::string>(v, "preset", "default"));
  if (v.contains("descriptors")) {
    c.descriptors.clear();
    for (const json& d : v.at("descriptors")) c.descriptors.push_back(descriptor_from_json(d));
  }
  if (v.contains("frame_size")) {
    const auto size = get_or<std::vector<int>>(v, "frame_size", {});
    if (size.size() != 2) throw ConfigError("frame_size must be [width, height]");
    c.frame_width = size[0];
    c.frame_height = size[1];
  }
  if (v.contains("evm")) c.evm = v.at("evm").is_null() ? std::nullopt : std::optional(evm_from_json(v.at("evm")));
  if (v.contains("tim")) {
    const json& t = v.at("tim");
    if (t.is_null()) {
      c.tim.reset();
    } else {
      check_keys(t, "tim", {"target_length"});
      c.tim = TimParams{get_or(t, "target_length", 10)};
    }
  }
  if (v.contains("wpca")) {
    const json& w = v.at("wpca");
    check_keys(w, "wpca", {"enabled", "components", "transductive"});
    c.wpca.enabled = get_or(w, "enabled", c.wpca.enabled);
    c.wpca.components = get_or(w, "components", c.wpca.components);
    c.wpca.transductive = get_or(w, "transductive", c.wpca.transductive);
  }
  c.fusion_normalize = get_or(v, "fusion_normalize", c.fusion_normalize);
  c.standardize = get_or(v, "standardize", c.standardize);
  c.protocol = get_or(v, "protocol", c.protocol);
  c.c_grid = get_or(v, "c_grid", c.c_grid);
  c.seed = get_or(v, "seed", c.seed);
  c.cache_dir = get_or(v, "cache_dir", c.cache_dir);
  c.threads = get_or(v, "threads", c.threads);
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json value;
  try {
    value = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(value);
}

}  // namespace elbptop
