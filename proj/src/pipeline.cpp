#include "elbptop/pipeline.hpp"

#include <algorithm>
#include <cstdlib>

#include "elbptop/cache.hpp"
#include "elbptop/error.hpp"
#include "elbptop/parallel.hpp"
#include "elbptop/report.hpp"

namespace elbptop {

VideoVolume preprocess_clip(const VideoVolume& volume, const RunConfig& config) {
  VideoVolume out = config.evm ? magnify(volume, *config.evm) : volume;
  if (config.tim) out = tim_interpolate(out, *config.tim);
  out.copy_metadata_from(volume);
  return out;
}

VideoVolume load_clip(const DatasetManifest& manifest, const ManifestEntry& entry, int width, int height) {
  std::vector<Frame> frames;
  VideoVolume volume;
  try {
    for (const auto& path : list_frames(manifest.resolve(entry))) frames.push_back(read_frame(path));
    volume = to_gray_resize(frames, width, height);
  } catch (const IngestError& e) {
    throw IngestError("clip " + entry.clip_id + ": " + e.what());
  }
  volume.clip_id = entry.clip_id;
  volume.subject_id = entry.subject_id;
  volume.label = entry.label;
  volume.dataset_id = entry.dataset_id;
  return volume;
}

std::string resolve_cache_dir(const RunConfig& config) {
  if (const char* env = std::getenv(kCacheDirEnv); env != nullptr && *env != '\0') return env;
  return config.cache_dir;
}

FeatureBank extract_features(const RunConfig& config, const DatasetManifest& manifest) {
  config.validate();
  std::vector<const ManifestEntry*> order;
  for (const auto& e : manifest.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->clip_id < b->clip_id; });
  std::vector<std::string> dataset_order;
  for (const auto* e : order) {
    if (std::find(dataset_order.begin(), dataset_order.end(), e->dataset_id) == dataset_order.end()) {
      dataset_order.push_back(e->dataset_id);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](auto* a, auto* b) {
    return std::find(dataset_order.begin(), dataset_order.end(), a->dataset_id) <
           std::find(dataset_order.begin(), dataset_order.end(), b->dataset_id);
  });

  FeatureBank bank;
  for (const auto* e : order) {
    bank.clips.clip_ids.push_back(e->clip_id);
    bank.clips.subjects.push_back(e->subject_id);
    bank.clips.datasets.push_back(e->dataset_id);
    const int label = manifest.class_index(e->label);
    if (label < 0) throw ConfigError("clip " + e->clip_id + " has label '" + e->label + "' outside class_names");
    bank.clips.labels.push_back(label);
  }

  const std::size_t nd = config.descriptors.size();
  std::vector<std::string> layouts;
  for (std::size_t d = 0; d < nd; ++d) {
    bank.hashes.push_back(config.feature_hash(d));
    layouts.push_back(config.descriptors[d].layout());
  }
  const std::string cache_dir = resolve_cache_dir(config);
  std::optional<FeatureCache> cache;
  if (!cache_dir.empty()) cache.emplace(cache_dir);

  // rows[clip][descriptor]
  std::vector<std::vector<std::vector<float>>> rows(order.size(), std::vector<std::vector<float>>(nd));
  std::vector<std::size_t> computed(order.size(), 0);
  parallel_for(order.size(), config.threads, [&](std::size_t i) {
    const ManifestEntry& entry = *order[i];
    std::vector<std::size_t> missing;
    for (std::size_t d = 0; d < nd; ++d) {
      std::optional<std::vector<float>> hit;
      if (cache) hit = cache->load(entry.clip_id, bank.hashes[d], layouts[d], config.descriptors[d].dimension());
      if (hit) {
        rows[i][d] = std::move(*hit);
      } else {
        missing.push_back(d);
      }
    }
    if (missing.empty()) return;
    try {
      const VideoVolume volume =
          preprocess_clip(load_clip(manifest, entry, config.frame_width, config.frame_height), config);
      for (std::size_t d : missing) {
        const DescriptorHistogram h = extract_descriptor(volume, config.descriptors[d]);
        rows[i][d].assign(h.values.begin(), h.values.end());
        if (cache) cache->store(entry.clip_id, bank.hashes[d], layouts[d], rows[i][d]);
        ++computed[i];
      }
    } catch (const IngestError&) {
      throw;
    } catch (const Error& e) {
      throw Error("clip " + entry.clip_id + ": " + e.what());
    }
  });

  for (std::size_t d = 0; d < nd; ++d) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(order.size()), static_cast<Eigen::Index>(config.descriptors[d].dimension()));
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t j = 0; j < rows[i][d].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][d][j];
    }
    bank.features.push_back(std::move(m));
  }
  for (std::size_t c : computed) bank.stats.computed += c;
  bank.stats.cached = order.size() * nd - bank.stats.computed;
  return bank;
}

FoldEmbedder::FoldEmbedder(const std::vector<Eigen::MatrixXd>& features, WpcaSettings settings, bool normalize)
    : features_(features), settings_(settings), normalize_(normalize), transductive_(features.size()) {}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

void normalize_rows(Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm > 0.0) m.row(i) /= norm;
  }
}

}  // namespace

const FoldEmbedder::Block& FoldEmbedder::block(std::size_t descriptor, std::span<const std::size_t> train_rows,
                                               std::span<const std::size_t> test_rows) {
  auto key = std::make_pair(descriptor, std::vector<std::size_t>(test_rows.begin(), test_rows.end()));
  {
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) return *it->second;
  }
  const Eigen::MatrixXd& all = features_.at(descriptor);
  auto made = std::make_shared<Block>();
  made->train = take_rows(all, train_rows);
  made->test = take_rows(all, test_rows);
  if (settings_.enabled) {
    std::shared_ptr<const WpcaModel> model;
    std::vector<std::size_t> fitted;
    if (settings_.transductive) {
      std::lock_guard lock(mutex_);
      if (!transductive_[descriptor]) {
        transductive_[descriptor] = std::make_shared<const WpcaModel>(wpca_fit(all, settings_.components));
        std::vector<std::size_t> every(static_cast<std::size_t>(all.rows()));
        for (std::size_t i = 0; i < every.size(); ++i) every[i] = i;
        fit_log_.push_back(std::move(every));
      }
      model = transductive_[descriptor];
    } else {
      model = std::make_shared<const WpcaModel>(wpca_fit(made->train, settings_.components));
      fitted.assign(train_rows.begin(), train_rows.end());
    }
    made->train = wpca_transform(*model, made->train);
    made->test = wpca_transform(*model, made->test);
    std::lock_guard lock(mutex_);
    if (!fitted.empty()) fit_log_.push_back(std::move(fitted));
  }
  std::lock_guard lock(mutex_);
  auto [it, inserted] = memo_.emplace(std::move(key), std::move(made));
  return *it->second;
}

FoldFeatures FoldEmbedder::transform(const std::vector<std::size_t>& descriptors,
                                     std::span<const std::size_t> train_rows, std::span<const std::size_t> test_rows) {
  std::vector<const Block*> blocks;
  Eigen::Index cols = 0;
  for (std::size_t d : descriptors) {
    blocks.push_back(&block(d, train_rows, test_rows));
    cols += blocks.back()->train.cols();
  }
  FoldFeatures out{Eigen::MatrixXd(static_cast<Eigen::Index>(train_rows.size()), cols),
                   Eigen::MatrixXd(static_cast<Eigen::Index>(test_rows.size()), cols)};
  Eigen::Index at = 0;
  for (const Block* b : blocks) {
    out.train.middleCols(at, b->train.cols()) = b->train;
    out.test.middleCols(at, b->test.cols()) = b->test;
    at += b->train.cols();
  }
  if (normalize_) {
    normalize_rows(out.train);
    normalize_rows(out.test);
  }
  return out;
}

FoldTransform FoldEmbedder::bind(std::vector<std::size_t> descriptors) {
  return [this, descriptors = std::move(descriptors)](std::span<const std::size_t> train,
                                                      std::span<const std::size_t> test) {
    return transform(descriptors, train, test);
  };
}

Eigen::MatrixXd FoldEmbedder::concatenated(const std::vector<std::size_t>& descriptors) const {
  Eigen::Index cols = 0;
  for (std::size_t d : descriptors) cols += features_.at(d).cols();
  Eigen::MatrixXd out(features_.empty() ? 0 : features_.front().rows(), cols);
  Eigen::Index at = 0;
  for (std::size_t d : descriptors) {
    out.middleCols(at, features_[d].cols()) = features_[d];
    at += features_[d].cols();
  }
  return out;
}

std::vector<std::vector<std::size_t>> FoldEmbedder::fit_log() const {
  std::lock_guard lock(mutex_);
  return fit_log_;
}

EvalReport evaluate_bank(const FeatureBank& bank, const std::vector<std::string>& class_names,
                         const RunConfig& config, const std::vector<std::size_t>& descriptors,
                         FoldEmbedder& embedder, const StageObserver& observer) {
  if (descriptors.empty()) throw ConfigError("no descriptors selected for evaluation");
  LosoOptions options;
  options.c_grid = config.c_grid;
  options.standardize = config.standardize;
  options.threads = config.threads;
  options.observer = observer;
  options.transform = embedder.bind(descriptors);

  const std::size_t n = bank.clips.labels.size();
  const Eigen::MatrixXd placeholder(static_cast<Eigen::Index>(n), 0);
  if (config.protocol == "loso") {
    const bool several = std::any_of(bank.clips.datasets.begin(), bank.clips.datasets.end(),
                                     [&](const std::string& d) { return d != bank.clips.datasets.front(); });
    return loso_evaluate(placeholder, bank.clips.labels, bank.clips.subjects, class_names, options,
                         several ? std::span<const std::string>(bank.clips.datasets) : std::span<const std::string>());
  }

  std::vector<CompositeSource> sources;
  for (std::size_t i = 0; i < n; ++i) {
    if (sources.empty() || sources.back().dataset_id != bank.clips.datasets[i]) {
      CompositeSource src;
      src.dataset_id = bank.clips.datasets[i];
      src.class_names = class_names;
      for (const auto& name : class_names) src.class_map[name] = name;
      sources.push_back(std::move(src));
    }
    sources.back().samples.push_back({Eigen::VectorXd(), bank.clips.subjects[i], bank.clips.labels[i],
                                      bank.clips.datasets[i], bank.clips.clip_ids[i]});
  }
  return composite_evaluate(sources, parse_composite_protocol(config.protocol), options, class_names);
}

PipelineResult run_pipeline(const RunConfig& config, const DatasetManifest& manifest, const StageObserver& observer) {
  const FeatureBank bank = extract_features(config, manifest);
  FoldEmbedder embedder(bank.features, config.wpca, config.fusion_normalize);
  std::vector<std::size_t> all(config.descriptors.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  PipelineResult result;
  result.report = evaluate_bank(bank, manifest.class_names, config, all, embedder, observer);
  result.report_json = report_to_json(result.report, config_to_json(config));
  result.report_json["clip_ids"] = bank.clips.clip_ids;
  result.report_json["feature_hashes"] = bank.hashes;
  result.stats = bank.stats;
  return result;
}

}  // namespace elbptop
