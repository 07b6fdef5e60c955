#include "elbptop/metrics.hpp"

#include <map>

#include "elbptop/error.hpp"

namespace elbptop {

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> truths,
                        std::span<const std::string> subjects, int num_classes) {
  if (predictions.empty()) throw ProtocolError("cannot score an empty prediction set");
  if (predictions.size() != truths.size() || predictions.size() != subjects.size()) {
    throw ShapeError("predictions, truths and subjects must have equal length");
  }
  if (num_classes < 1) throw ConfigError("need at least one class");

  const auto nc = static_cast<std::size_t>(num_classes);
  Metrics m;
  m.confusion.assign(nc, std::vector<int>(nc, 0));
  std::map<std::string, std::pair<int, int>> per_subject;  // correct, total
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int p = predictions[i];
    const int t = truths[i];
    if (p < 0 || p >= num_classes || t < 0 || t >= num_classes) {
      throw ProtocolError("class id outside [0, " + std::to_string(num_classes) + ")");
    }
    ++m.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
    auto& s = per_subject[subjects[i]];
    s.first += p == t;
    ++s.second;
  }

  double subject_sum = 0.0;
  for (const auto& [id, s] : per_subject) subject_sum += static_cast<double>(s.first) / s.second;
  m.mean_accuracy = subject_sum / static_cast<double>(per_subject.size());

  const double total = static_cast<double>(predictions.size());
  m.recall.assign(nc, 0.0);
  m.precision.assign(nc, 0.0);
  m.f1.assign(nc, 0.0);
  m.support.assign(nc, 0);
  int trace = 0;
  int truth_classes = 0;
  int scored_classes = 0;
  double recall_sum = 0.0;
  double f1_sum = 0.0;
  double weighted = 0.0;
  for (std::size_t k = 0; k < nc; ++k) {
    trace += m.confusion[k][k];
    int row = 0;
    int col = 0;
    for (std::size_t j = 0; j < nc; ++j) {
      row += m.confusion[k][j];
      col += m.confusion[j][k];
    }
    m.support[k] = row;
    const double tp = m.confusion[k][k];
    if (row > 0) m.recall[k] = tp / row;
    if (col > 0) m.precision[k] = tp / col;
    const double pr = m.precision[k] + m.recall[k];
    if (pr > 0) m.f1[k] = 2.0 * m.precision[k] * m.recall[k] / pr;
    if (row > 0) {
      ++truth_classes;
      recall_sum += m.recall[k];
      weighted += row / total * m.f1[k];
    }
    if (row > 0 || col > 0) {
      ++scored_classes;
      f1_sum += m.f1[k];
    }
  }
  m.pooled_accuracy = trace / total;
  m.uar = recall_sum / truth_classes;
  m.f1_macro = f1_sum / scored_classes;
  m.f1_weighted = weighted;
  return m;
}

}  // namespace elbptop
