#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elbptop/descriptor.hpp"
#include "elbptop/preprocess.hpp"

namespace elbptop {

struct WpcaSettings {
  bool enabled = true;
  int components = 0;         // 0: n_train - 1
  bool transductive = false;  // fit on every clip instead of the training fold
  bool operator==(const WpcaSettings&) const = default;
};

struct RunConfig {
  std::vector<DescriptorConfig> descriptors;
  int frame_width = 64;
  int frame_height = 64;
  std::optional<EvmParams> evm;
  std::optional<TimParams> tim;
  WpcaSettings wpca;
  bool fusion_normalize = false;  // rescale the fused vector to unit L2 norm
  bool standardize = false;       // z-score features inside each fold
  std::string protocol = "loso";  // loso, megc2018, megc2019
  std::vector<double> c_grid;
  std::uint64_t seed = 0;
  std::string cache_dir;  // empty: no feature cache
  int threads = 0;        // 0: one per hardware thread

  void validate() const;
  // Cache key of descriptor i: covers the descriptor, frame size, EVM and TIM.
  std::string feature_hash(std::size_t descriptor) const;
};

// LBP (1, 8), ADLBP (1, 8) and RDLBP (2, 8, 1) on TOP with full patterns,
// 8x8x2 blocks, EVM alpha 20 and TIM to 10 frames.
RunConfig default_config();
// "default", "casme2", "samm", "smic".
RunConfig preset(std::string_view name);

nlohmann::json descriptor_to_json(const DescriptorConfig& config);
DescriptorConfig descriptor_from_json(const nlohmann::json& value);
nlohmann::json evm_to_json(const EvmParams& params);
EvmParams evm_from_json(const nlohmann::json& value);

// Fully resolved form, every field present.
nlohmann::json config_to_json(const RunConfig& config);
// Missing fields take their defaults; unknown fields are a ConfigError.
RunConfig config_from_json(const nlohmann::json& value);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace elbptop
