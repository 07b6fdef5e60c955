#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "elbptop/config.hpp"
#include "elbptop/error.hpp"
#include "elbptop/manifest.hpp"
#include "elbptop/pipeline.hpp"
#include "elbptop/report.hpp"
#include "elbptop/synth.hpp"

using namespace elbptop;
using nlohmann::json;

namespace {

// Command-line overrides layered on top of a config file or preset.
struct ConfigFlags {
  std::string config_path;
  std::string preset = "default";
  std::vector<int> frame_size;
  std::vector<int> blocks;
  std::string encoding;
  std::string planes;
  std::optional<double> alpha;
  std::optional<double> freq_low;
  std::optional<double> freq_high;
  std::string freq_unit;
  std::optional<double> frame_rate;
  bool no_evm = false;
  std::optional<int> tim_length;
  bool no_tim = false;
  std::optional<int> wpca_components;
  bool no_wpca = false;
  bool transductive = false;
  bool fusion_normalize = false;
  bool standardize = false;
  std::string protocol;
  std::vector<double> c_grid;
  std::optional<std::uint64_t> seed;
  std::string cache_dir;
  std::optional<int> threads;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "RunConfig JSON file");
    app->add_option("--preset", preset, "default, casme2, samm or smic");
    app->add_option("--frame-size", frame_size, "width height")->expected(2);
    app->add_option("--blocks", blocks, "m q l, applied to every descriptor")->expected(3);
    app->add_option("--encoding", encoding, "full, u2, ri or riu2 for every descriptor");
    app->add_option("--planes", planes, "TOP, XYOT, XOT, YOT or XY for every descriptor");
    app->add_option("--alpha", alpha, "magnification factor");
    app->add_option("--freq-low", freq_low, "lower band edge");
    app->add_option("--freq-high", freq_high, "upper band edge");
    app->add_option("--freq-unit", freq_unit, "cycles_per_frame or hz");
    app->add_option("--frame-rate", frame_rate, "frames per second, for hz band edges");
    app->add_flag("--no-evm", no_evm, "skip motion magnification");
    app->add_option("--tim-length", tim_length, "temporal interpolation target length");
    app->add_flag("--no-tim", no_tim, "skip temporal interpolation");
    app->add_option("--wpca-components", wpca_components, "0 keeps n_train - 1");
    app->add_flag("--no-wpca", no_wpca, "classify raw histograms");
    app->add_flag("--transductive", transductive, "fit WPCA on all clips");
    app->add_flag("--fusion-normalize", fusion_normalize, "L2-normalize fused vectors");
    app->add_flag("--standardize", standardize, "z-score features inside each fold");
    app->add_option("--protocol", protocol, "loso, megc2018 or megc2019");
    app->add_option("--c-grid", c_grid, "SVM penalty grid");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--cache-dir", cache_dir, "feature cache directory");
    app->add_option("--threads", threads, "worker threads, 0 for all cores");
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? elbptop::preset(preset) : load_config(config_path);
    if (!frame_size.empty()) c.frame_width = frame_size[0], c.frame_height = frame_size[1];
    for (auto& d : c.descriptors) {
      if (!blocks.empty()) d.grid = {blocks[0], blocks[1], blocks[2]};
      if (!encoding.empty()) d.encoding = parse_encoding(encoding);
      if (!planes.empty()) d.planes = PlaneSet::parse(planes);
    }
    if (no_evm) {
      c.evm.reset();
    } else if (alpha || freq_low || freq_high || !freq_unit.empty() || frame_rate) {
      if (!c.evm) c.evm = EvmParams{};
      if (alpha) c.evm->alpha = *alpha;
      if (freq_low) c.evm->freq_low = *freq_low;
      if (freq_high) c.evm->freq_high = *freq_high;
      if (!freq_unit.empty()) c.evm->unit = parse_frequency_unit(freq_unit);
      if (frame_rate) c.evm->frame_rate = *frame_rate;
    }
    if (no_tim) {
      c.tim.reset();
    } else if (tim_length) {
      c.tim = TimParams{*tim_length};
    }
    if (wpca_components) c.wpca.components = *wpca_components;
    if (no_wpca) c.wpca.enabled = false;
    if (transductive) c.wpca.transductive = true;
    if (fusion_normalize) c.fusion_normalize = true;
    if (standardize) c.standardize = true;
    if (!protocol.empty()) c.protocol = protocol;
    if (!c_grid.empty()) c.c_grid = c_grid;
    if (seed) c.seed = *seed;
    if (!cache_dir.empty()) c.cache_dir = cache_dir;
    if (threads) c.threads = *threads;
    c.validate();
    return c;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended local binary pattern features and evaluation for facial micro-expression clips"};
  app.require_subcommand(1);

  SynthSpec spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "render a synthetic micro-expression dataset");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--classes", spec.classes);
  synth->add_option("--subjects", spec.subjects);
  synth->add_option("--clips", spec.clips_per_subject, "clips per subject");
  synth->add_option("--width", spec.width);
  synth->add_option("--height", spec.height);
  synth->add_option("--length", spec.length, "frames per clip");
  synth->add_option("--seed", spec.seed);
  synth->add_option("--drift", spec.drift_pixels, "peak drift in pixels");
  synth->add_option("--pulse", spec.pulse_levels, "peak brightness pulse in gray levels");
  synth->add_option("--noise", spec.noise_levels, "noise standard deviation in gray levels");

  std::string manifest_path, out_path, text_path;
  ConfigFlags extract_flags, eval_flags, fusion_flags;

  auto* extract = app.add_subcommand("extract", "compute and cache descriptor features");
  extract->add_option("--manifest", manifest_path)->required();
  extract_flags.add(extract);

  auto* evaluate = app.add_subcommand("evaluate", "run the full pipeline and write an evaluation report");
  evaluate->add_option("--manifest", manifest_path)->required();
  evaluate->add_option("--out", out_path, "report JSON path");
  evaluate->add_option("--text", text_path, "plain-text table path");
  eval_flags.add(evaluate);

  std::size_t top = 20;
  auto* fusion = app.add_subcommand("fusion-search", "rank all 215 descriptor fusion schemes");
  fusion->add_option("--manifest", manifest_path)->required();
  fusion->add_option("--out", out_path, "ranking JSON path");
  fusion->add_option("--top", top, "rows to print");
  fusion_flags.add(fusion);

  std::string report_in;
  auto* report = app.add_subcommand("report", "print a saved report as a table");
  report->add_option("--in", report_in)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const DatasetManifest m = synth_generate(spec, synth_out);
      std::cout << "wrote " << m.entries.size() << " clips to " << synth_out << "\n";
    } else if (*extract) {
      const RunConfig config = extract_flags.resolve();
      const FeatureBank bank = extract_features(config, load_manifest(manifest_path));
      std::cout << "clips: " << bank.clips.clip_ids.size() << ", computed: " << bank.stats.computed
                << ", cached: " << bank.stats.cached << "\n";
      for (std::size_t d = 0; d < config.descriptors.size(); ++d) {
        std::cout << config.descriptors[d].layout() << " hash=" << bank.hashes[d] << "\n";
      }
    } else if (*evaluate) {
      const PipelineResult result = run_pipeline(eval_flags.resolve(), load_manifest(manifest_path));
      if (!out_path.empty()) write_text(out_path, result.report_json.dump(2) + "\n");
      const std::string table = report_to_text(result.report);
      if (!text_path.empty()) write_text(text_path, table);
      std::cout << table;
    } else if (*fusion) {
      const RunConfig config = fusion_flags.resolve();
      const auto ranking = fusion_search(config, load_manifest(manifest_path));
      if (!out_path.empty()) {
        write_text(out_path, json{{"config", config_to_json(config)}, {"ranking", fusion_to_json(ranking)}}.dump(2) + "\n");
      }
      std::cout << fusion_to_text(ranking, top);
    } else if (*report) {
      std::ifstream in(report_in);
      if (!in) throw IngestError("cannot open " + report_in);
      std::cout << report_json_to_text(json::parse(in));
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const IngestError& e) {
    std::cerr << "ingest error: " << e.what() << "\n";
    return 3;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
