#include "elbptop/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include "elbptop/error.hpp"
#include "elbptop/parallel.hpp"

namespace elbptop {

std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int e = -5; e <= 15; e += 2) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

void SvmClassifier::fit(const Eigen::MatrixXd& rows, std::span<const int> labels, int num_classes, double c) {
  const std::set<int> present(labels.begin(), labels.end());
  if (present.size() == 1) {
    constant_ = *present.begin();
    return;
  }
  constant_ = -1;
  model_ = LinearSvm::train(rows, labels, num_classes, c, options_);
}

std::vector<int> SvmClassifier::predict(const Eigen::MatrixXd& rows) const {
  if (constant_ >= 0) return std::vector<int>(static_cast<std::size_t>(rows.rows()), constant_);
  return model_.predict_rows(rows);
}

bool SvmClassifier::converged() const { return constant_ >= 0 || model_.converged(); }

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kEmbeddingFit:
      return "embedding_fit";
    case Stage::kSelection:
      return "selection";
    case Stage::kTraining:
      return "training";
  }
  return "unknown";
}

std::string_view to_string(CompositeProtocol protocol) {
  return protocol == CompositeProtocol::kMegc2018 ? "megc2018" : "megc2019";
}

CompositeProtocol parse_composite_protocol(std::string_view name) {
  if (name == "megc2018") return CompositeProtocol::kMegc2018;
  if (name == "megc2019") return CompositeProtocol::kMegc2019;
  throw ConfigError("unknown composite protocol '" + std::string(name) + "'");
}

namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& features, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

// z-score columns with statistics of `train`; constant columns are only centered.
void standardize(Eigen::MatrixXd& train, Eigen::MatrixXd& test) {
  const Eigen::RowVectorXd mean = train.colwise().mean();
  Eigen::RowVectorXd sd = ((train.rowwise() - mean).array().square().colwise().sum() /
                           std::max<double>(1.0, static_cast<double>(train.rows()) - 1.0))
                              .sqrt();
  for (Eigen::Index j = 0; j < sd.size(); ++j) {
    if (!(sd(j) > 1e-12)) sd(j) = 1.0;
  }
  train = (train.rowwise() - mean).array().rowwise() / sd.array();
  if (test.rows() > 0) test = (test.rowwise() - mean).array().rowwise() / sd.array();
}

std::unique_ptr<Classifier> make_classifier(const LosoOptions& options) {
  if (options.classifier) return options.classifier();
  return std::make_unique<SvmClassifier>(options.svm);
}

struct FoldOutcome {
  FoldResult result;
  std::vector<std::string> warnings;
};

}  // namespace

EvalReport loso_evaluate(const Eigen::MatrixXd& features, std::span<const int> labels,
                         std::span<const std::string> subjects, std::span<const std::string> class_names,
                         const LosoOptions& options, std::span<const std::string> dataset_ids) {
  const std::size_t n = labels.size();
  if (static_cast<std::size_t>(features.rows()) != n || subjects.size() != n ||
      (!dataset_ids.empty() && dataset_ids.size() != n)) {
    throw ShapeError("features, labels and subjects must describe the same samples");
  }
  if (options.c_grid.empty()) throw ConfigError("penalty grid is empty");
  for (double c : options.c_grid) {
    if (!(c > 0.0)) throw ConfigError("penalty grid values must be positive");
  }
  const int num_classes = static_cast<int>(class_names.size());
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw ProtocolError("label outside the declared class set");
  }
  for (const auto& s : subjects) {
    if (s.empty()) throw ProtocolError("empty subject id");
  }
  const std::set<std::string> subject_set(subjects.begin(), subjects.end());
  if (subject_set.size() < 2) throw ProtocolError("leave-one-subject-out needs at least two subjects");
  const std::vector<std::string> order(subject_set.begin(), subject_set.end());

  std::mutex observer_mutex;
  auto observe = [&](const std::string& subject, Stage stage, std::span<const std::size_t> rows) {
    if (!options.observer) return;
    std::lock_guard lock(observer_mutex);
    options.observer(subject, stage, rows);
  };

  std::vector<FoldOutcome> outcomes(order.size());
  parallel_for(order.size(), options.threads, [&](std::size_t f) {
    const std::string& held_out = order[f];
    FoldOutcome& out = outcomes[f];
    FoldResult& fold = out.result;
    fold.subject_id = held_out;

    std::vector<std::size_t> train_rows;
    for (std::size_t i = 0; i < n; ++i) {
      (subjects[i] == held_out ? fold.rows : train_rows).push_back(i);
    }

    FoldFeatures ff;
    if (options.transform) {
      observe(held_out, Stage::kEmbeddingFit, train_rows);
      ff = options.transform(train_rows, fold.rows);
      if (ff.train.rows() != static_cast<Eigen::Index>(train_rows.size()) ||
          ff.test.rows() != static_cast<Eigen::Index>(fold.rows.size()) || ff.train.cols() != ff.test.cols()) {
        throw ShapeError("fold transform returned mismatched shapes for subject " + held_out);
      }
    } else {
      ff.train = gather(features, train_rows);
      ff.test = gather(features, fold.rows);
    }
    if (options.standardize) standardize(ff.train, ff.test);
    fold.train_dimension = static_cast<std::size_t>(ff.train.cols());

    std::vector<int> train_labels;
    std::vector<std::string> train_subjects;
    for (std::size_t i : train_rows) {
      train_labels.push_back(labels[i]);
      train_subjects.push_back(subjects[i]);
    }
    const std::set<int> train_classes(train_labels.begin(), train_labels.end());
    if (train_classes.size() < 2) {
      out.warnings.push_back("fold " + held_out + ": training set holds a single class; predicting it constantly");
    }

    // Inner selection over the outer-training subjects.
    const std::set<std::string> inner_set(train_subjects.begin(), train_subjects.end());
    const std::vector<std::string> inner(inner_set.begin(), inner_set.end());
    if (inner.size() < 2) {
      fold.selection_fallback = true;
      fold.c = options.c_grid[options.c_grid.size() / 2];
      out.warnings.push_back("fold " + held_out + ": fewer than two training subjects; using c = " +
                             std::to_string(fold.c));
    } else {
      fold.inner_scores.assign(options.c_grid.size(), 0.0);
      for (const std::string& val : inner) {
        std::vector<std::size_t> fit_local, val_local;
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
          (train_subjects[i] == val ? val_local : fit_local).push_back(i);
        }
        std::vector<std::size_t> seen;
        for (std::size_t i : fit_local) seen.push_back(train_rows[i]);
        for (std::size_t i : val_local) seen.push_back(train_rows[i]);
        observe(held_out, Stage::kSelection, seen);

        const Eigen::MatrixXd fit_x = gather(ff.train, fit_local);
        const Eigen::MatrixXd val_x = gather(ff.train, val_local);
        std::vector<int> fit_y;
        for (std::size_t i : fit_local) fit_y.push_back(train_labels[i]);
        for (std::size_t g = 0; g < options.c_grid.size(); ++g) {
          auto model = make_classifier(options);
          model->fit(fit_x, fit_y, num_classes, options.c_grid[g]);
          fold.converged = fold.converged && model->converged();
          const std::vector<int> pred = model->predict(val_x);
          int correct = 0;
          for (std::size_t i = 0; i < val_local.size(); ++i) correct += pred[i] == train_labels[val_local[i]];
          fold.inner_scores[g] += static_cast<double>(correct) / static_cast<double>(val_local.size());
        }
      }
      std::size_t best = 0;
      for (std::size_t g = 0; g < options.c_grid.size(); ++g) {
        fold.inner_scores[g] /= static_cast<double>(inner.size());
        const double score = fold.inner_scores[g];
        const double top = fold.inner_scores[best];
        if (g == 0 || score > top || (score == top && options.c_grid[g] < options.c_grid[best])) best = g;
      }
      fold.c = options.c_grid[best];
    }

    observe(held_out, Stage::kTraining, train_rows);
    auto model = make_classifier(options);
    model->fit(ff.train, train_labels, num_classes, fold.c);
    fold.converged = fold.converged && model->converged();
    fold.predictions = model->predict(ff.test);
    for (std::size_t i : fold.rows) fold.truths.push_back(labels[i]);
    if (!fold.converged) {
      out.warnings.push_back("fold " + held_out + ": SVM solver hit its iteration cap before converging");
    }
  });

  EvalReport report;
  report.class_names.assign(class_names.begin(), class_names.end());
  report.predictions.assign(n, -1);
  report.truths.assign(labels.begin(), labels.end());
  report.subjects.assign(subjects.begin(), subjects.end());
  for (FoldOutcome& out : outcomes) {
    for (std::size_t i = 0; i < out.result.rows.size(); ++i) {
      report.predictions[out.result.rows[i]] = out.result.predictions[i];
    }
    report.converged = report.converged && out.result.converged;
    report.warnings.insert(report.warnings.end(), out.warnings.begin(), out.warnings.end());
    report.folds.push_back(std::move(out.result));
  }
  report.metrics = compute_metrics(report.predictions, report.truths, report.subjects, num_classes);

  if (!dataset_ids.empty()) {
    std::vector<std::string> ids;
    for (const auto& d : dataset_ids) {
      if (std::find(ids.begin(), ids.end(), d) == ids.end()) ids.push_back(d);
    }
    for (const std::string& id : ids) {
      std::vector<int> p, t;
      std::vector<std::string> s;
      for (std::size_t i = 0; i < n; ++i) {
        if (dataset_ids[i] != id) continue;
        p.push_back(report.predictions[i]);
        t.push_back(labels[i]);
        s.push_back(subjects[i]);
      }
      report.sources.push_back({id, p.size(), compute_metrics(p, t, s, num_classes)});
    }
  }
  report.headline = {"mean_accuracy", "f1_macro"};
  return report;
}

EvalReport loso_evaluate(std::span<const LabeledFeature> data, std::span<const std::string> class_names,
                         const LosoOptions& options) {
  if (data.empty()) throw ProtocolError("no samples to evaluate");
  const Eigen::Index d = data.front().vector.size();
  Eigen::MatrixXd features(static_cast<Eigen::Index>(data.size()), d);
  std::vector<int> labels;
  std::vector<std::string> subjects;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].vector.size() != d) throw ShapeError("feature vectors differ in length");
    features.row(static_cast<Eigen::Index>(i)) = data[i].vector.transpose();
    labels.push_back(data[i].label);
    subjects.push_back(data[i].subject_id);
  }
  return loso_evaluate(features, labels, subjects, class_names, options);
}

EvalReport composite_evaluate(std::span<const CompositeSource> sources, CompositeProtocol protocol,
                              const LosoOptions& options, std::span<const std::string> class_order) {
  if (sources.empty()) throw ProtocolError("no datasets to merge");

  std::vector<std::string> classes(class_order.begin(), class_order.end());
  const bool fixed_order = !classes.empty();
  auto class_id = [&](const std::string& name) -> int {
    auto it = std::find(classes.begin(), classes.end(), name);
    if (it != classes.end()) return static_cast<int>(it - classes.begin());
    if (fixed_order) throw ConfigError("composite class '" + name + "' is not in the class order");
    classes.push_back(name);
    return static_cast<int>(classes.size()) - 1;
  };
  for (const CompositeSource& src : sources) {
    for (const std::string& name : src.class_names) {
      auto it = src.class_map.find(name);
      if (it != src.class_map.end()) class_id(it->second);
    }
  }

  const bool namespaced = sources.size() > 1;
  std::vector<int> labels;
  std::vector<std::string> subjects, datasets;
  std::vector<const Eigen::VectorXd*> rows;
  for (const CompositeSource& src : sources) {
    for (const LabeledFeature& s : src.samples) {
      if (s.label < 0 || static_cast<std::size_t>(s.label) >= src.class_names.size()) {
        throw ConfigError("dataset " + src.dataset_id + ": label id outside its class list");
      }
      const std::string& name = src.class_names[static_cast<std::size_t>(s.label)];
      auto it = src.class_map.find(name);
      if (it == src.class_map.end()) {
        throw ConfigError("dataset " + src.dataset_id + ": label '" + name + "' has no composite class");
      }
      labels.push_back(class_id(it->second));
      subjects.push_back(namespaced ? src.dataset_id + "/" + s.subject_id : s.subject_id);
      datasets.push_back(src.dataset_id);
      rows.push_back(&s.vector);
    }
  }
  if (rows.empty()) throw ProtocolError("no samples to evaluate");
  Eigen::MatrixXd features(static_cast<Eigen::Index>(rows.size()), rows.front()->size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i]->size() != features.cols()) throw ShapeError("feature vectors differ in length across datasets");
    features.row(static_cast<Eigen::Index>(i)) = rows[i]->transpose();
  }

  EvalReport report = loso_evaluate(features, labels, subjects, classes, options, datasets);
  report.protocol = std::string(to_string(protocol));
  if (protocol == CompositeProtocol::kMegc2018) {
    report.headline = {"f1_weighted", "uar"};
  } else {
    report.headline = {"f1_macro", "uar"};
  }
  return report;
}

}  // namespace elbptop
