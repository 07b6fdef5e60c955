#pragma once

#include <json.hpp>
#include <string>

#include "elbptop/protocol.hpp"

namespace elbptop {

nlohmann::json metrics_to_json(const Metrics& metrics);
// `config` is echoed verbatim under "config" when not null.
nlohmann::json report_to_json(const EvalReport& report, const nlohmann::json& config = nullptr);

// Plain-text summary: an Acc./F1 table with one row for the full set and
// one per source dataset, then the confusion matrix.
std::string report_to_text(const EvalReport& report);
// Same table rebuilt from a JSON report.
std::string report_json_to_text(const nlohmann::json& report);

}  // namespace elbptop
