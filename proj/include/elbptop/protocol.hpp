#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elbptop/metrics.hpp"
#include "elbptop/svm.hpp"

namespace elbptop {

struct LabeledFeature {
  Eigen::VectorXd vector;
  std::string subject_id;
  int label = 0;
  std::string dataset_id;
  std::string clip_id;
};

// Default penalty grid 2^-5, 2^-3, ..., 2^15.
std::vector<double> default_c_grid();

// Anything that can stand in for the linear SVM inside the protocol.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void fit(const Eigen::MatrixXd& rows, std::span<const int> labels, int num_classes, double c) = 0;
  virtual std::vector<int> predict(const Eigen::MatrixXd& rows) const = 0;
  virtual bool converged() const { return true; }
};
using ClassifierFactory = std::function<std::unique_ptr<Classifier>()>;

class SvmClassifier : public Classifier {
 public:
  explicit SvmClassifier(SvmOptions options = {}) : options_(options) {}
  void fit(const Eigen::MatrixXd& rows, std::span<const int> labels, int num_classes, double c) override;
  std::vector<int> predict(const Eigen::MatrixXd& rows) const override;
  bool converged() const override;

 private:
  SvmOptions options_;
  LinearSvm model_;
  int constant_ = -1;  // set when the training set holds a single class
};

enum class Stage { kEmbeddingFit, kSelection, kTraining };
std::string_view to_string(Stage stage);

// Called with the held-out subject of the outer fold, the stage, and the
// indices (into the evaluated data) that the stage consumed. Calls are
// serialized.
using StageObserver = std::function<void(const std::string& test_subject, Stage, std::span<const std::size_t>)>;

// Per outer fold: maps the training and held-out rows into the space the
// classifier sees. Must fit anything it learns on the training rows only.
struct FoldFeatures {
  Eigen::MatrixXd train;
  Eigen::MatrixXd test;
};
using FoldTransform =
    std::function<FoldFeatures(std::span<const std::size_t> train_rows, std::span<const std::size_t> test_rows)>;

struct LosoOptions {
  std::vector<double> c_grid = default_c_grid();
  bool standardize = false;
  SvmOptions svm;
  ClassifierFactory classifier;  // empty: linear SVM with `svm`
  FoldTransform transform;       // empty: rows used as given
  StageObserver observer;
  int threads = 1;
};

struct FoldResult {
  std::string subject_id;
  double c = 0.0;
  bool selection_fallback = false;  // fewer than two training subjects
  bool converged = true;
  std::vector<double> inner_scores;  // inner mean accuracy per grid value
  std::vector<std::size_t> rows;     // indices of the held-out samples
  std::vector<int> predictions;
  std::vector<int> truths;
  std::size_t train_dimension = 0;
};

struct SourceBreakdown {
  std::string dataset_id;
  std::size_t samples = 0;
  Metrics metrics;
};

struct EvalReport {
  std::string protocol = "loso";
  std::vector<std::string> headline;  // metric names the protocol reports
  std::vector<std::string> class_names;
  std::vector<FoldResult> folds;
  std::vector<int> predictions;  // per sample, in input order
  std::vector<int> truths;
  std::vector<std::string> subjects;
  Metrics metrics;
  std::vector<SourceBreakdown> sources;
  std::vector<std::string> warnings;
  bool converged = true;
};

// Leave-one-subject-out with nested leave-one-subject-out penalty selection.
// Folds are ordered by subject id. Throws ProtocolError with fewer than two
// subjects and ConfigError for an empty or non-positive c grid.
EvalReport loso_evaluate(std::span<const LabeledFeature> data, std::span<const std::string> class_names,
                         const LosoOptions& options = {});

// Same protocol on a prebuilt feature matrix (row i belongs to sample i).
EvalReport loso_evaluate(const Eigen::MatrixXd& features, std::span<const int> labels,
                         std::span<const std::string> subjects, std::span<const std::string> class_names,
                         const LosoOptions& options = {}, std::span<const std::string> dataset_ids = {});

enum class CompositeProtocol { kMegc2018, kMegc2019 };
std::string_view to_string(CompositeProtocol protocol);
CompositeProtocol parse_composite_protocol(std::string_view name);

struct CompositeSource {
  std::string dataset_id;
  std::vector<std::string> class_names;  // source label space
  std::vector<LabeledFeature> samples;   // labels index class_names
  std::map<std::string, std::string> class_map;  // source class -> composite class
};

// Remaps labels, namespaces subject ids as "<dataset>/<subject>" when more
// than one source is merged, and runs LOSO over the union. Composite classes
// are ordered by first appearance walking sources and their class lists in
// order, unless `class_order` is given. Throws ConfigError for an unmapped
// label.
EvalReport composite_evaluate(std::span<const CompositeSource> sources, CompositeProtocol protocol,
                              const LosoOptions& options = {}, std::span<const std::string> class_order = {});

}  // namespace elbptop
