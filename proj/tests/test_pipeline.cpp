#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "elbptop/cache.hpp"
#include "elbptop/config.hpp"
#include "elbptop/error.hpp"
#include "elbptop/manifest.hpp"
#include "elbptop/pipeline.hpp"
#include "elbptop/report.hpp"
#include "elbptop/synth.hpp"

using namespace elbptop;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("elbptop_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SynthSpec small_spec() {
  SynthSpec s;
  s.classes = 3;
  s.subjects = 3;
  s.clips_per_subject = 3;
  s.width = 32;
  s.height = 32;
  s.length = 8;
  s.seed = 5;
  return s;
}

RunConfig small_config() {
  RunConfig c = default_config();
  c.frame_width = 32;
  c.frame_height = 32;
  for (auto& d : c.descriptors) d.grid = {2, 2, 1};
  c.tim = TimParams{6};
  c.c_grid = {0.5, 8.0};
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("config survives a JSON round trip") {
  RunConfig c = preset("samm");
  c.seed = 42;
  c.c_grid = {1.0, 2.0};
  c.wpca.components = 7;
  c.evm->unit = FrequencyUnit::kHertz;
  c.evm->frame_rate = 200;
  c.evm->freq_low = 10;
  c.evm->freq_high = 50;
  const auto j = config_to_json(c);
  const RunConfig back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(back.descriptors.size() == 3);
  CHECK(back.descriptors[0].grid.m == 5);
  CHECK(back.wpca == c.wpca);
  CHECK(back.seed == 42);

  RunConfig no_pre = c;
  no_pre.evm.reset();
  no_pre.tim.reset();
  CHECK(config_to_json(config_from_json(config_to_json(no_pre))) == config_to_json(no_pre));
}

TEST_CASE("config rejects unknown fields and bad values") {
  auto j = config_to_json(default_config());
  j["colour"] = true;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  auto k = config_to_json(default_config());
  k["descriptors"][0]["radious"] = 2;
  CHECK_THROWS_AS(config_from_json(k), ConfigError);
  auto g = config_to_json(default_config());
  g["c_grid"] = nlohmann::json::array();
  CHECK_THROWS_AS(config_from_json(g), ConfigError);
  CHECK_THROWS_AS(preset("casme3"), ConfigError);
}

TEST_CASE("presets carry the published parameter settings") {
  const RunConfig casme = preset("casme2");
  CHECK(casme.descriptors[0].grid.m == 8);
  CHECK(casme.descriptors[0].grid.l == 2);
  CHECK(casme.evm->alpha == 20.0);
  CHECK(casme.tim->target_length == 10);
  CHECK(preset("samm").descriptors[2].grid.q == 5);
  CHECK(preset("smic").evm->alpha == 8.0);
  CHECK(config_to_json(preset("default")) == config_to_json(default_config()));
}

TEST_CASE("every feature parameter changes the cache key") {
  const RunConfig base = default_config();
  const std::string h = base.feature_hash(0);
  std::vector<RunConfig> changed(12, base);
  changed[0].descriptors[0].neighbors.radius = 2;
  changed[1].descriptors[0].neighbors.points = 12;
  changed[2].descriptors[0].encoding = Encoding::kUniform;
  changed[3].descriptors[0].planes = PlaneSet::parse("XY");
  changed[4].descriptors[0].grid.m = 4;
  changed[5].frame_width = 48;
  changed[6].evm->alpha = 10;
  changed[7].evm->freq_high = 0.3;
  changed[8].evm.reset();
  changed[9].tim->target_length = 12;
  changed[10].tim.reset();
  changed[11].descriptors[0].kind = CodeKind::kAdlbp;
  std::set<std::string> keys = {h};
  for (const auto& c : changed) keys.insert(c.feature_hash(0));
  CHECK(keys.size() == 13);

  RunConfig same = base;
  same.seed = 9;
  same.threads = 3;
  same.c_grid = {1.0};
  same.wpca.enabled = false;
  CHECK(same.feature_hash(0) == h);
  CHECK(h.size() == 16);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("cache records round-trip and reject truncation") {
  const fs::path dir = scratch("record");
  const CacheRecord rec{"lbp;x", "00ff", {1.5f, -2.0f, 3.25f}};
  write_record(dir / "r.feat", rec);
  std::ifstream in(dir / "r.feat", std::ios::binary);
  std::string header;
  std::getline(in, header);
  CHECK(header == "dims=3 layout=lbp;x config_hash=00ff");
  const CacheRecord back = read_record(dir / "r.feat");
  CHECK(back.values == rec.values);
  CHECK(back.layout == rec.layout);

  fs::resize_file(dir / "r.feat", fs::file_size(dir / "r.feat") - 2);
  CHECK_THROWS_AS(read_record(dir / "r.feat"), IngestError);

  FeatureCache cache(dir / "c");
  cache.store("clip/1", "abc", "lay", {1.0f, 2.0f});
  CHECK(cache.load("clip/1", "abc", "lay", 2).value() == std::vector<float>{1.0f, 2.0f});
  CHECK_FALSE(cache.load("clip/1", "abc", "lay", 3).has_value());
  CHECK_FALSE(cache.load("clip/1", "abc", "other", 2).has_value());
  CHECK_FALSE(cache.load("clip/2", "abc", "lay", 2).has_value());
  fs::resize_file(cache.record_path("clip/1", "abc"), 10);
  CHECK_FALSE(cache.load("clip/1", "abc", "lay", 2).has_value());
}

TEST_CASE("synthetic clips are deterministic and differ only in the motion region") {
  SynthSpec spec = small_spec();
  const VideoVolume a = synth_clip(spec, 1, 2, 0);
  CHECK(synth_clip(spec, 1, 2, 0).data() == a.data());
  for (double v : a.data()) CHECK(v == std::round(v));
  for (int other = 1; other < 3; ++other) {
    const VideoVolume b = synth_clip(spec, 1, 2, other);
    const auto m0 = synth_region_mask(spec, 0);
    const auto m1 = synth_region_mask(spec, other);
    bool inside_differs = false;
    for (int t = 0; t < a.length(); ++t) {
      for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
          const std::size_t px = static_cast<std::size_t>(y * a.width() + x);
          if (!m0[px] && !m1[px]) {
            REQUIRE(a.at(x, y, t) == b.at(x, y, t));
          } else {
            inside_differs = inside_differs || a.at(x, y, t) != b.at(x, y, t);
          }
        }
      }
    }
    CHECK(inside_differs);
  }
  spec.seed = 6;
  CHECK(synth_clip(spec, 1, 2, 0).data() != a.data());
  CHECK(synth_label(spec, 2, 3) == 2);
}

TEST_CASE("written frames ingest back within one gray level") {
  const fs::path dir = scratch("synth");
  const SynthSpec spec = small_spec();
  const DatasetManifest m = synth_generate(spec, dir);
  CHECK(m.entries.size() == 9);
  CHECK(fs::exists(dir / "manifest.json"));
  const auto source = synth_volumes(spec);
  const auto loaded = ingest(load_manifest(dir / "manifest.json"), spec.width, spec.height, 2);
  REQUIRE(loaded.size() == source.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].clip_id == source[i].clip_id);
    CHECK(loaded[i].length() == spec.length);
    for (std::size_t k = 0; k < loaded[i].size(); ++k) REQUIRE(std::abs(loaded[i].data()[k] - source[i].data()[k]) <= 1.0);
  }
}

TEST_CASE("manifest save and load are inverse") {
  const fs::path dir = scratch("manifest");
  const DatasetManifest m = synth_generate(small_spec(), dir);
  save_manifest(m, dir / "copy.json");
  const DatasetManifest a = load_manifest(dir / "manifest.json");
  const DatasetManifest b = load_manifest(dir / "copy.json");
  CHECK(a.entries == b.entries);
  CHECK(a.class_names == b.class_names);
  CHECK(a.frame_rate == b.frame_rate);
}

TEST_CASE("ingestion errors") {
  const fs::path dir = scratch("broken");
  synth_generate(small_spec(), dir);
  auto j = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));

  auto bad_label = j;
  bad_label["entries"][0]["label"] = "nope";
  std::ofstream(dir / "bad_label.json") << bad_label.dump();
  CHECK_THROWS_AS(load_manifest(dir / "bad_label.json"), ConfigError);

  auto dup = j;
  dup["entries"][1]["clip_id"] = dup["entries"][0]["clip_id"];
  std::ofstream(dir / "dup.json") << dup.dump();
  CHECK_THROWS_AS(load_manifest(dir / "dup.json"), ConfigError);

  auto missing = j;
  missing["entries"][0]["clip_path"] = "does_not_exist";
  std::ofstream(dir / "missing.json") << missing.dump();
  CHECK_THROWS_AS(load_manifest(dir / "missing.json"), IngestError);

  CHECK_THROWS_AS(load_manifest(dir / "absent.json"), IngestError);

  const DatasetManifest m = load_manifest(dir / "manifest.json");
  const fs::path clip = m.resolve(m.entries[0]);
  fs::remove(clip / "frame_003.png");
  try {
    ingest(m, 32, 32);
    FAIL("expected an ingestion error");
  } catch (const IngestError& e) {
    CHECK(std::string(e.what()).find(m.entries[0].clip_id) != std::string::npos);
  }
  fs::copy_file(clip / "frame_004.png", clip / "frame_0003.png");
  CHECK_THROWS_AS(list_frames(clip), IngestError);
}

TEST_CASE("manifest row order does not change the features") {
  const fs::path dir = scratch("order");
  DatasetManifest m = synth_generate(small_spec(), dir);
  RunConfig c = small_config();
  const FeatureBank a = extract_features(c, m);
  std::mt19937_64 rng(3);
  std::shuffle(m.entries.begin(), m.entries.end(), rng);
  const FeatureBank b = extract_features(c, m);
  CHECK(a.clips.clip_ids == b.clips.clip_ids);
  CHECK(std::is_sorted(a.clips.clip_ids.begin(), a.clips.clip_ids.end()));
  for (std::size_t d = 0; d < a.features.size(); ++d) CHECK(a.features[d] == b.features[d]);
}

TEST_CASE("warm and cold cache runs agree bitwise") {
  const fs::path dir = scratch("cache");
  const DatasetManifest m = synth_generate(small_spec(), dir / "data");
  RunConfig c = small_config();
  c.cache_dir = (dir / "cache").string();
  unsetenv(kCacheDirEnv);

  const PipelineResult cold = run_pipeline(c, m);
  CHECK(cold.stats.computed == 27);
  CHECK(cold.stats.cached == 0);
  const PipelineResult warm = run_pipeline(c, m);
  CHECK(warm.stats.computed == 0);
  CHECK(warm.stats.cached == 27);
  CHECK(cold.report_json.dump() == warm.report_json.dump());
  CHECK(cold.report_json["config"] == config_to_json(c));

  // a record written under another layout is stale and gets recomputed
  FeatureCache cache(dir / "cache");
  const std::string first = cold.report_json["clip_ids"][0].get<std::string>();
  write_record(cache.record_path(first, c.feature_hash(0)),
               {"something-else", c.feature_hash(0), std::vector<float>(c.descriptors[0].dimension(), 0.0f)});
  const PipelineResult stale = run_pipeline(c, m);
  CHECK(stale.stats.computed == 1);
  CHECK(stale.report_json.dump() == cold.report_json.dump());

  // environment override wins over the configured directory
  setenv(kCacheDirEnv, (dir / "env").string().c_str(), 1);
  CHECK(resolve_cache_dir(c) == (dir / "env").string());
  const PipelineResult env = run_pipeline(c, m);
  unsetenv(kCacheDirEnv);
  CHECK(env.stats.computed == 27);
  CHECK(fs::exists(dir / "env" / "cache_index.json"));
}

TEST_CASE("pipeline folds never fit on the held-out subject") {
  const fs::path dir = scratch("hygiene");
  const DatasetManifest m = synth_generate(small_spec(), dir);
  RunConfig c = small_config();
  const FeatureBank bank = extract_features(c, m);
  FoldEmbedder embedder(bank.features, c.wpca, c.fusion_normalize);
  bool leaked = false;
  const StageObserver observer = [&](const std::string& held, Stage, std::span<const std::size_t> rows) {
    for (std::size_t i : rows) leaked = leaked || bank.clips.subjects[i] == held;
  };
  const EvalReport r = evaluate_bank(bank, m.class_names, c, {0, 1, 2}, embedder, observer);
  CHECK_FALSE(leaked);
  const auto log = embedder.fit_log();
  CHECK(log.size() == 3 * r.folds.size());
  for (const auto& rows : log) {
    std::set<std::string> subjects;
    for (std::size_t i : rows) subjects.insert(bank.clips.subjects[i]);
    CHECK(subjects.size() == 2);
  }
  CHECK(r.folds.front().train_dimension == 3 * 5);
}

TEST_CASE("report text and JSON forms") {
  const fs::path dir = scratch("report");
  const DatasetManifest m = synth_generate(small_spec(), dir);
  const PipelineResult res = run_pipeline(small_config(), m);
  const std::string text = report_to_text(res.report);
  CHECK(text.find("Acc.") != std::string::npos);
  CHECK(report_json_to_text(res.report_json) == text);
  CHECK(res.report_json["clip_ids"].size() == 9);
  CHECK(res.report_json["metrics"]["mean_accuracy"].get<double>() == res.report.metrics.mean_accuracy);
}

TEST_CASE("scheme enumeration") {
  const auto schemes = enumerate_schemes();
  CHECK(schemes.size() == 215);
  std::set<std::string> names;
  for (const auto& s : schemes) names.insert(s.name());
  CHECK(names.size() == 215);
  CHECK(schemes.front().name() == "RDLBPTOP");
  CHECK(schemes.back().name() == "LBPXY+ADLBPXY+RDLBPXY");
  CHECK(schemes[36 + 6 + 1 - 1].name() == "LBPTOP+ADLBPTOP+RDLBPTOP");
}

TEST_CASE("fusion search favors temporal planes when only motion carries the class") {
  // Each clip is one random texture translated horizontally at a class-specific
  // speed; every XY frame is the same kind of noise whatever the class.
  const fs::path dir = scratch("fusion");
  DatasetManifest m;
  m.class_names = {"still", "slow", "fast"};
  m.frame_rate = 30;
  m.root = dir;
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> level(0, 255);
  const int w = 20, h = 20, len = 8;
  for (int s = 0; s < 4; ++s) {
    for (int k = 0; k < 3; ++k) {
      for (int rep = 0; rep < 2; ++rep) {
        const std::string id = "m" + std::to_string(s) + "_" + std::to_string(k) + std::to_string(rep);
        fs::create_directories(dir / id);
        std::vector<double> tex(static_cast<std::size_t>(w * h));
        for (double& v : tex) v = level(rng);
        for (int t = 0; t < len; ++t) {
          std::vector<double> frame(tex.size());
          for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
              frame[static_cast<std::size_t>(y * w + x)] = tex[static_cast<std::size_t>(y * w + ((x + k * t) % w))];
            }
          }
          char name[32];
          std::snprintf(name, sizeof name, "f%02d.png", t);
          write_gray_frame(dir / id / name, frame.data(), w, h);
        }
        m.entries.push_back({id, id, "p" + std::to_string(s), m.class_names[static_cast<std::size_t>(k)], "motion"});
      }
    }
  }
  RunConfig c = default_config();
  c.frame_width = w;
  c.frame_height = h;
  c.evm.reset();
  c.tim.reset();
  for (auto& d : c.descriptors) d.grid = {1, 1, 1};
  c.c_grid = {1.0};
  c.threads = 1;
  ExtractionStats stats;
  const auto ranking = fusion_search(c, m, &stats);
  REQUIRE(ranking.size() == 215);
  CHECK(stats.computed == 24 * 15);
  for (std::size_t i = 1; i < ranking.size(); ++i) {
    CHECK(ranking[i - 1].metrics.mean_accuracy >= ranking[i].metrics.mean_accuracy);
  }
  double best_xy = 0.0, worst_temporal = 1.0;
  for (const auto& r : ranking) {
    bool all_xy = true, all_temporal = true;
    for (int o : r.scheme.option) {
      if (o == 0) continue;
      all_xy = all_xy && o == 5;
      all_temporal = all_temporal && o != 5;
    }
    if (all_xy) best_xy = std::max(best_xy, r.metrics.mean_accuracy);
    if (all_temporal) worst_temporal = std::min(worst_temporal, r.metrics.mean_accuracy);
  }
  CHECK(best_xy < worst_temporal);
  const auto j = fusion_to_json(ranking);
  CHECK(j.size() == 215);
  CHECK(j[0]["rank"] == 1);
}
