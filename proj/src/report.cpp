#include "elbptop/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace elbptop {

using nlohmann::json;

json metrics_to_json(const Metrics& m) {
  return {{"mean_accuracy", m.mean_accuracy}, {"pooled_accuracy", m.pooled_accuracy},
          {"f1_macro", m.f1_macro},           {"f1_weighted", m.f1_weighted},
          {"uar", m.uar},                     {"confusion", m.confusion},
          {"recall", m.recall},               {"precision", m.precision},
          {"f1", m.f1},                       {"support", m.support}};
}

json report_to_json(const EvalReport& report, const json& config) {
  json folds = json::array();
  for (const FoldResult& f : report.folds) {
    folds.push_back({{"subject_id", f.subject_id},
                     {"c", f.c},
                     {"selection_fallback", f.selection_fallback},
                     {"converged", f.converged},
                     {"inner_scores", f.inner_scores},
                     {"rows", f.rows},
                     {"predictions", f.predictions},
                     {"truths", f.truths},
                     {"train_dimension", f.train_dimension}});
  }
  json sources = json::array();
  for (const SourceBreakdown& s : report.sources) {
    sources.push_back({{"dataset_id", s.dataset_id}, {"samples", s.samples}, {"metrics", metrics_to_json(s.metrics)}});
  }
  json out = {{"protocol", report.protocol},
              {"headline", report.headline},
              {"class_names", report.class_names},
              {"metrics", metrics_to_json(report.metrics)},
              {"sources", sources},
              {"folds", folds},
              {"predictions", report.predictions},
              {"truths", report.truths},
              {"subjects", report.subjects},
              {"warnings", report.warnings},
              {"converged", report.converged}};
  if (!config.is_null()) out["config"] = config;
  return out;
}

namespace {

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%6.2f", 100.0 * v);
  return buf;
}

std::string table(const json& r) {
  std::ostringstream out;
  out << "protocol: " << r.value("protocol", "loso") << "\n";
  out << "set          Acc.     F1   WF1    UAR\n";
  auto row = [&](const std::string& name, const json& m) {
    std::string label = name.substr(0, 10);
    label.resize(10, ' ');
    out << label << " " << percent(m.at("mean_accuracy")) << " " << percent(m.at("f1_macro")) << " "
        << percent(m.at("f1_weighted")) << " " << percent(m.at("uar")) << "\n";
  };
  row("full", r.at("metrics"));
  for (const json& s : r.value("sources", json::array())) row(s.at("dataset_id"), s.at("metrics"));

  const auto names = r.at("class_names").get<std::vector<std::string>>();
  std::size_t width = 6;
  for (const auto& n : names) width = std::max(width, n.size() + 1);
  out << "\nconfusion (rows: truth, columns: prediction)\n";
  out << std::string(width, ' ');
  for (const auto& n : names) out << std::string(width - n.size(), ' ') << n;
  out << "\n";
  const json& confusion = r.at("metrics").at("confusion");
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << names[i] << std::string(width - names[i].size(), ' ');
    for (const json& v : confusion.at(i)) {
      const std::string cell = std::to_string(v.get<int>());
      out << std::string(width - cell.size(), ' ') << cell;
    }
    out << "\n";
  }
  for (const json& w : r.value("warnings", json::array())) out << "warning: " << w.get<std::string>() << "\n";
  return out.str();
}

}  // namespace

std::string report_to_text(const EvalReport& report) { return table(report_to_json(report)); }

std::string report_json_to_text(const json& report) { return table(report); }

}  // namespace elbptop
