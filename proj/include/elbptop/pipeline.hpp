#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elbptop/config.hpp"
#include "elbptop/manifest.hpp"
#include "elbptop/protocol.hpp"
#include "elbptop/wpca.hpp"

namespace elbptop {

// Magnification (when configured) followed by temporal interpolation.
VideoVolume preprocess_clip(const VideoVolume& volume, const RunConfig& config);

// Decodes one manifest clip at the configured frame size.
VideoVolume load_clip(const DatasetManifest& manifest, const ManifestEntry& entry, int width, int height);

struct ClipTable {
  std::vector<std::string> clip_ids;
  std::vector<std::string> subjects;
  std::vector<std::string> datasets;
  std::vector<int> labels;  // index into the manifest's class_names
};

struct ExtractionStats {
  std::size_t computed = 0;  // (clip, descriptor) pairs extracted
  std::size_t cached = 0;    // pairs served from the cache
};

// One matrix per descriptor, rows ordered like the returned table: clips are
// sorted by id and then grouped by dataset in first-appearance order.
// Values are rounded through 32-bit floats whether or not they were cached.
struct FeatureBank {
  ClipTable clips;
  std::vector<Eigen::MatrixXd> features;
  std::vector<std::string> hashes;
  ExtractionStats stats;
};

// Uses the cache directory from $ELBPTOP_CACHE_DIR, else config.cache_dir,
// else no cache.
FeatureBank extract_features(const RunConfig& config, const DatasetManifest& manifest);
std::string resolve_cache_dir(const RunConfig& config);

// Builds the per-fold transform: each selected descriptor block is whitened
// with a model fit on the fold's training rows (or on every row when
// transductive), then the blocks are concatenated. Whitened blocks are
// memoized per (descriptor, fold) and shared between calls.
class FoldEmbedder {
 public:
  FoldEmbedder(const std::vector<Eigen::MatrixXd>& features, WpcaSettings settings, bool normalize);

  FoldFeatures transform(const std::vector<std::size_t>& descriptors, std::span<const std::size_t> train_rows,
                         std::span<const std::size_t> test_rows);
  FoldTransform bind(std::vector<std::size_t> descriptors);
  // Raw concatenation of the selected descriptors, every row.
  Eigen::MatrixXd concatenated(const std::vector<std::size_t>& descriptors) const;

  // Clip rows each WPCA fit consumed, in fit order; for hygiene checks.
  std::vector<std::vector<std::size_t>> fit_log() const;

 private:
  struct Block {
    Eigen::MatrixXd train;
    Eigen::MatrixXd test;
  };
  const Block& block(std::size_t descriptor, std::span<const std::size_t> train_rows,
                     std::span<const std::size_t> test_rows);

  const std::vector<Eigen::MatrixXd>& features_;
  WpcaSettings settings_;
  bool normalize_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::shared_ptr<Block>> memo_;
  std::vector<std::shared_ptr<const WpcaModel>> transductive_;
  std::vector<std::vector<std::size_t>> fit_log_;
};

// Evaluates the given descriptors of a bank under the configured protocol.
// Composite protocols treat each dataset id as a source with an identity
// class map.
EvalReport evaluate_bank(const FeatureBank& bank, const std::vector<std::string>& class_names,
                         const RunConfig& config, const std::vector<std::size_t>& descriptors,
                         FoldEmbedder& embedder, const StageObserver& observer = {});

struct PipelineResult {
  EvalReport report;
  nlohmann::json report_json;  // includes the resolved config echo
  ExtractionStats stats;
};

PipelineResult run_pipeline(const RunConfig& config, const DatasetManifest& manifest,
                            const StageObserver& observer = {});

// Fusion search over the three code kinds, each absent or on one of TOP,
// XYOT, XOT, YOT, XY: 6^3 - 1 schemes.
inline constexpr std::array<const char*, 6> kPlaneOptions = {"", "TOP", "XYOT", "XOT", "YOT", "XY"};

struct FusionScheme {
  int index = 0;                   // base-6 digits (lbp, adlbp, rdlbp), 1..215
  std::array<int, 3> option{};     // per kind, index into kPlaneOptions
  std::string name() const;        // e.g. "LBPXY+ADLBPTOP"
};
std::vector<FusionScheme> enumerate_schemes();

struct SchemeResult {
  FusionScheme scheme;
  std::string name;
  std::size_t kinds = 0;  // number of code kinds present
  Metrics metrics;
  std::vector<double> chosen_c;
};

// Ranked by mean accuracy descending, then macro F1, then enumeration index.
// The template supplies one descriptor per code kind; kinds it lacks use the
// defaults.
std::vector<SchemeResult> fusion_search(const RunConfig& config, const DatasetManifest& manifest,
                                        ExtractionStats* stats = nullptr);
nlohmann::json fusion_to_json(const std::vector<SchemeResult>& ranking);
std::string fusion_to_text(const std::vector<SchemeResult>& ranking, std::size_t top = 20);

}  // namespace elbptop
