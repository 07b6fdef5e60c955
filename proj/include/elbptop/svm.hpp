#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace elbptop {

struct SvmOptions {
  double tolerance = 1e-6;
  long max_iterations = 0;  // 0: max(10^7, 100 n)
};

// Soft-margin hinge-loss SVM with linear kernel, solved in the dual by SMO
// with second-order working-set selection. Decision value is w.x + b.
struct BinarySvm {
  Eigen::VectorXd weights;
  double bias = 0.0;
  long iterations = 0;
  bool converged = true;

  double decision(const Eigen::Ref<const Eigen::VectorXd>& x) const { return weights.dot(x) + bias; }
};

// `signs` holds +1 / -1 per row. Deterministic for a fixed row order.
BinarySvm train_binary_svm(const Eigen::MatrixXd& rows, std::span<const int> signs, double c,
                           const SvmOptions& options = {});

// One-vs-one multiclass linear SVM over class ids [0, num_classes).
class LinearSvm {
 public:
  struct PairModel {
    int positive;  // decision > 0 votes for this class
    int negative;
    BinarySvm svm;
  };

  // Throws ProtocolError when fewer than two classes are present and
  // ConfigError for c <= 0.
  static LinearSvm train(const Eigen::MatrixXd& rows, std::span<const int> labels, int num_classes, double c,
                         const SvmOptions& options = {});

  // Majority vote; ties go to the larger summed decision value, then the
  // smaller class id.
  int predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  std::vector<int> predict_rows(const Eigen::MatrixXd& rows) const;

  const std::vector<PairModel>& pairs() const { return pairs_; }
  int num_classes() const { return num_classes_; }
  bool converged() const;

 private:
  std::vector<PairModel> pairs_;
  int num_classes_ = 0;
};

}  // namespace elbptop
