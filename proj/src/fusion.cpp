#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "elbptop/error.hpp"
#include "elbptop/pipeline.hpp"
#include "elbptop/report.hpp"

namespace elbptop {

namespace {

constexpr std::array<CodeKind, 3> kKinds = {CodeKind::kLbp, CodeKind::kAdlbp, CodeKind::kRdlbp};
constexpr std::size_t kPlaneChoices = kPlaneOptions.size() - 1;

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string FusionScheme::name() const {
  std::string out;
  for (std::size_t k = 0; k < kKinds.size(); ++k) {
    if (option[k] == 0) continue;
    if (!out.empty()) out += "+";
    out += upper(to_string(kKinds[k])) + kPlaneOptions[static_cast<std::size_t>(option[k])];
  }
  return out;
}

std::vector<FusionScheme> enumerate_schemes() {
  std::vector<FusionScheme> schemes;
  for (int index = 1; index < 216; ++index) {
    FusionScheme s;
    s.index = index;
    s.option = {index / 36, (index / 6) % 6, index % 6};
    schemes.push_back(s);
  }
  return schemes;
}

std::vector<SchemeResult> fusion_search(const RunConfig& config, const DatasetManifest& manifest,
                                        ExtractionStats* stats) {
  config.validate();
  const RunConfig defaults = default_config();
  RunConfig variants = config;
  variants.descriptors.clear();
  for (CodeKind kind : kKinds) {
    auto pick = [&](const RunConfig& c) {
      return std::find_if(c.descriptors.begin(), c.descriptors.end(), [&](const auto& d) { return d.kind == kind; });
    };
    auto it = pick(config);
    const DescriptorConfig base = it != config.descriptors.end() ? *it : *pick(defaults);
    for (std::size_t o = 1; o < kPlaneOptions.size(); ++o) {
      DescriptorConfig d = base;
      d.planes = PlaneSet::parse(kPlaneOptions[o]);
      variants.descriptors.push_back(d);
    }
  }

  const FeatureBank bank = extract_features(variants, manifest);
  if (stats) *stats = bank.stats;
  FoldEmbedder embedder(bank.features, config.wpca, config.fusion_normalize);

  std::vector<SchemeResult> results;
  for (const FusionScheme& scheme : enumerate_schemes()) {
    std::vector<std::size_t> selected;
    for (std::size_t k = 0; k < kKinds.size(); ++k) {
      if (scheme.option[k] > 0) selected.push_back(k * kPlaneChoices + static_cast<std::size_t>(scheme.option[k]) - 1);
    }
    const EvalReport report = evaluate_bank(bank, manifest.class_names, config, selected, embedder);
    SchemeResult r;
    r.scheme = scheme;
    r.name = scheme.name();
    r.kinds = selected.size();
    r.metrics = report.metrics;
    for (const FoldResult& f : report.folds) r.chosen_c.push_back(f.c);
    results.push_back(std::move(r));
  }
  std::stable_sort(results.begin(), results.end(), [](const SchemeResult& a, const SchemeResult& b) {
    if (a.metrics.mean_accuracy != b.metrics.mean_accuracy) return a.metrics.mean_accuracy > b.metrics.mean_accuracy;
    if (a.metrics.f1_macro != b.metrics.f1_macro) return a.metrics.f1_macro > b.metrics.f1_macro;
    return a.scheme.index < b.scheme.index;
  });
  return results;
}

nlohmann::json fusion_to_json(const std::vector<SchemeResult>& ranking) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const SchemeResult& r = ranking[i];
    out.push_back({{"rank", i + 1},
                   {"scheme", r.name},
                   {"index", r.scheme.index},
                   {"planes", {kPlaneOptions[static_cast<std::size_t>(r.scheme.option[0])],
                               kPlaneOptions[static_cast<std::size_t>(r.scheme.option[1])],
                               kPlaneOptions[static_cast<std::size_t>(r.scheme.option[2])]}},
                   {"kinds", r.kinds},
                   {"chosen_c", r.chosen_c},
                   {"metrics", metrics_to_json(r.metrics)}});
  }
  return out;
}

std::string fusion_to_text(const std::vector<SchemeResult>& ranking, std::size_t top) {
  std::ostringstream out;
  out << "rank    Acc.     F1  scheme\n";
  for (std::size_t i = 0; i < ranking.size() && i < top; ++i) {
    char line[64];
    std::snprintf(line, sizeof line, "%4zu  %6.2f %6.2f  ", i + 1, 100.0 * ranking[i].metrics.mean_accuracy,
                  100.0 * ranking[i].metrics.f1_macro);
    out << line << ranking[i].name << "\n";
  }
  return out.str();
}

}  // namespace elbptop
