#pragma once

#include <span>
#include <string>
#include <vector>

namespace elbptop {

struct Metrics {
  double mean_accuracy = 0.0;    // mean over subjects of per-subject accuracy
  double pooled_accuracy = 0.0;  // trace(confusion) / N
  double f1_macro = 0.0;
  double f1_weighted = 0.0;
  double uar = 0.0;
  // confusion[truth][prediction], num_classes x num_classes
  std::vector<std::vector<int>> confusion;
  std::vector<double> recall;     // per class, 0 for classes absent from the truth
  std::vector<double> precision;  // per class, 0 when never predicted
  std::vector<double> f1;
  std::vector<int> support;  // truth count per class
};

// Class ids must lie in [0, num_classes). f1_macro averages over classes that
// occur in the truth or the predictions; uar averages recall over classes
// present in the truth; f1_weighted weights class F1 by truth count.
// Throws ProtocolError for empty input and ShapeError on length mismatch.
Metrics compute_metrics(std::span<const int> predictions, std::span<const int> truths,
                        std::span<const std::string> subjects, int num_classes);

}  // namespace elbptop
