#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "elbptop/error.hpp"
#include "elbptop/protocol.hpp"
#include "elbptop/wpca.hpp"

using namespace elbptop;

namespace {

// Column 0 carries the true label; predicts it back.
class LabelReader : public Classifier {
 public:
  void fit(const Eigen::MatrixXd&, std::span<const int>, int, double) override {}
  std::vector<int> predict(const Eigen::MatrixXd& rows) const override {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) out.push_back(static_cast<int>(std::lround(rows(i, 0))));
    return out;
  }
};

class AlwaysZero : public Classifier {
 public:
  void fit(const Eigen::MatrixXd&, std::span<const int>, int, double) override {}
  std::vector<int> predict(const Eigen::MatrixXd& rows) const override {
    return std::vector<int>(static_cast<std::size_t>(rows.rows()), 0);
  }
};

std::vector<LabeledFeature> gaussian_set(std::uint64_t seed, int subjects, int per_class, int classes, int dim,
                                         double spread) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::VectorXd> centers;
  for (int k = 0; k < classes; ++k) {
    Eigen::VectorXd c(dim);
    for (int d = 0; d < dim; ++d) c(d) = 4.0 * g(rng);
    centers.push_back(c);
  }
  std::vector<LabeledFeature> out;
  for (int s = 0; s < subjects; ++s) {
    for (int k = 0; k < classes; ++k) {
      for (int i = 0; i < per_class; ++i) {
        LabeledFeature f;
        f.vector = centers[static_cast<std::size_t>(k)];
        for (int d = 0; d < dim; ++d) f.vector(d) += spread * g(rng);
        f.subject_id = "s" + std::to_string(s);
        f.label = k;
        f.dataset_id = "toy";
        out.push_back(std::move(f));
      }
    }
  }
  return out;
}

const std::vector<std::string> kThree = {"a", "b", "c"};

}  // namespace

TEST_CASE("a classifier that reads the label scores perfectly") {
  auto data = gaussian_set(1, 4, 3, 3, 2, 1.0);
  for (auto& f : data) f.vector(0) = f.label;
  LosoOptions opt;
  opt.classifier = [] { return std::make_unique<LabelReader>(); };
  const EvalReport r = loso_evaluate(data, kThree, opt);
  CHECK(r.metrics.mean_accuracy == 1.0);
  CHECK(r.metrics.f1_macro == 1.0);
  CHECK(r.metrics.uar == 1.0);
  CHECK(r.folds.size() == 4);
}

TEST_CASE("a constant predictor has chance-level UAR whatever the imbalance") {
  auto data = gaussian_set(2, 3, 2, 3, 2, 1.0);
  for (int i = 0; i < 7; ++i) {
    LabeledFeature extra = data.front();
    data.push_back(extra);
  }
  LosoOptions opt;
  opt.classifier = [] { return std::make_unique<AlwaysZero>(); };
  const EvalReport r = loso_evaluate(data, kThree, opt);
  CHECK(r.metrics.uar == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("separable Gaussian classes across eight subjects") {
  const auto data = gaussian_set(3, 8, 4, 3, 6, 0.8);
  const EvalReport a = loso_evaluate(data, kThree);
  CHECK(a.metrics.mean_accuracy >= 0.9);
  CHECK(a.converged);
  LosoOptions threaded;
  threaded.threads = 3;
  const EvalReport b = loso_evaluate(data, kThree, threaded);
  CHECK(a.predictions == b.predictions);
  for (std::size_t f = 0; f < a.folds.size(); ++f) {
    CHECK(a.folds[f].subject_id == b.folds[f].subject_id);
    CHECK(a.folds[f].c == b.folds[f].c);
    CHECK(a.folds[f].inner_scores == b.folds[f].inner_scores);
  }
  CHECK(a.metrics.f1_weighted == b.metrics.f1_weighted);
}

TEST_CASE("chosen penalty maximizes inner accuracy with ties to the smallest value") {
  const auto data = gaussian_set(4, 5, 3, 3, 4, 2.0);
  const EvalReport r = loso_evaluate(data, kThree);
  const auto grid = default_c_grid();
  for (const FoldResult& f : r.folds) {
    const double top = *std::max_element(f.inner_scores.begin(), f.inner_scores.end());
    const auto first = std::find(f.inner_scores.begin(), f.inner_scores.end(), top) - f.inner_scores.begin();
    CHECK(f.c == grid[static_cast<std::size_t>(first)]);
  }
  CHECK(grid.size() == 11);
  CHECK(grid.front() == 1.0 / 32.0);
  CHECK(grid.back() == 32768.0);
}

TEST_CASE("no stage ever sees the held-out subject") {
  auto data = gaussian_set(5, 5, 2, 3, 3, 1.0);
  std::vector<std::string> subjects;
  for (const auto& f : data) subjects.push_back(f.subject_id);
  std::map<std::string, std::set<Stage>> stages;
  bool leaked = false;
  LosoOptions opt;
  opt.threads = 2;
  opt.observer = [&](const std::string& held_out, Stage stage, std::span<const std::size_t> rows) {
    stages[held_out].insert(stage);
    for (std::size_t i : rows) leaked = leaked || subjects[i] == held_out;
  };
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.size()), 3);
  std::vector<int> labels;
  for (std::size_t i = 0; i < data.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = data[i].vector.transpose();
    labels.push_back(data[i].label);
  }
  opt.transform = [&](std::span<const std::size_t> train, std::span<const std::size_t> test) {
    Eigen::MatrixXd tr(static_cast<Eigen::Index>(train.size()), 3), te(static_cast<Eigen::Index>(test.size()), 3);
    for (std::size_t i = 0; i < train.size(); ++i) tr.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(train[i]));
    for (std::size_t i = 0; i < test.size(); ++i) te.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(test[i]));
    const WpcaModel m = wpca_fit(tr);
    return FoldFeatures{wpca_transform(m, tr), wpca_transform(m, te)};
  };
  const EvalReport r = loso_evaluate(x, labels, subjects, kThree, opt);
  CHECK_FALSE(leaked);
  CHECK(stages.size() == 5);
  for (const auto& [s, seen] : stages) CHECK(seen.size() == 3);
  CHECK(r.folds.front().train_dimension <= 3);
}

TEST_CASE("fewer than two training subjects falls back to the middle penalty") {
  const auto data = gaussian_set(6, 2, 3, 3, 3, 0.5);
  const EvalReport r = loso_evaluate(data, kThree);
  for (const FoldResult& f : r.folds) {
    CHECK(f.selection_fallback);
    CHECK(f.c == default_c_grid()[5]);
    CHECK(f.inner_scores.empty());
  }
  CHECK(r.warnings.size() == 2);
}

TEST_CASE("a single-class training fold predicts that class") {
  auto data = gaussian_set(7, 3, 2, 2, 2, 0.5);
  for (auto& f : data) f.label = f.subject_id == "s2" ? 1 : 0;
  const std::vector<std::string> two = {"neg", "pos"};
  const EvalReport r = loso_evaluate(data, two);
  const FoldResult& held = r.folds.back();
  CHECK(held.subject_id == "s2");
  for (int p : held.predictions) CHECK(p == 0);
  CHECK(std::any_of(r.warnings.begin(), r.warnings.end(),
                    [](const std::string& w) { return w.find("single class") != std::string::npos; }));
}

TEST_CASE("protocol argument checks") {
  auto data = gaussian_set(8, 1, 2, 3, 2, 1.0);
  CHECK_THROWS_AS(loso_evaluate(data, kThree), ProtocolError);
  data = gaussian_set(8, 2, 2, 3, 2, 1.0);
  LosoOptions empty;
  empty.c_grid.clear();
  CHECK_THROWS_AS(loso_evaluate(data, kThree, empty), ConfigError);
  LosoOptions negative;
  negative.c_grid = {1.0, -1.0};
  CHECK_THROWS_AS(loso_evaluate(data, kThree, negative), ConfigError);
  data.front().label = 7;
  CHECK_THROWS_AS(loso_evaluate(data, kThree), ProtocolError);
}

TEST_CASE("merging two single-subject datasets gives one fold per subject") {
  const auto a = gaussian_set(9, 1, 2, 2, 3, 0.5);
  const auto b = gaussian_set(10, 1, 2, 2, 3, 0.5);
  const std::vector<std::string> names = {"x", "y"};
  const std::map<std::string, std::string> id = {{"x", "x"}, {"y", "y"}};
  const std::vector<CompositeSource> sources = {{"da", names, a, id}, {"db", names, b, id}};
  const EvalReport r = composite_evaluate(sources, CompositeProtocol::kMegc2019);
  REQUIRE(r.folds.size() == 2);
  CHECK(r.folds[0].subject_id == "da/s0");
  CHECK(r.folds[1].subject_id == "db/s0");
  CHECK(r.headline == std::vector<std::string>{"f1_macro", "uar"});
  CHECK(r.protocol == "megc2019");
}

TEST_CASE("a single dataset with an identity map matches plain LOSO") {
  const auto data = gaussian_set(11, 4, 2, 3, 4, 1.0);
  std::map<std::string, std::string> id;
  for (const auto& c : kThree) id[c] = c;
  const std::vector<CompositeSource> sources = {{"only", kThree, data, id}};
  const EvalReport merged = composite_evaluate(sources, CompositeProtocol::kMegc2018);
  const EvalReport plain = loso_evaluate(data, kThree);
  CHECK(merged.predictions == plain.predictions);
  CHECK(merged.subjects == plain.subjects);
  CHECK(merged.metrics.f1_weighted == plain.metrics.f1_weighted);
  CHECK(merged.headline == std::vector<std::string>{"f1_weighted", "uar"});
}

TEST_CASE("grouping five classes into three") {
  const std::vector<std::string> five = {"happy", "sad", "angry", "surprised", "disgust"};
  const std::map<std::string, std::string> group = {
      {"happy", "positive"}, {"sad", "negative"}, {"angry", "negative"}, {"surprised", "surprise"}, {"disgust", "negative"}};
  const auto a = gaussian_set(12, 3, 2, 5, 4, 1.0);
  const auto b = gaussian_set(13, 2, 1, 5, 4, 1.0);
  const std::vector<CompositeSource> sources = {{"first", five, a, group}, {"second", five, b, group}};
  const EvalReport r = composite_evaluate(sources, CompositeProtocol::kMegc2018);
  CHECK(r.class_names == std::vector<std::string>{"positive", "negative", "surprise"});
  CHECK(r.metrics.confusion.size() == 3);
  CHECK(r.folds.size() == 5);
  REQUIRE(r.sources.size() == 2);
  CHECK(r.sources[0].samples == a.size());
  CHECK(r.sources[1].samples == b.size());
  for (const auto& src : r.sources) {
    int rows = 0;
    for (const auto& row : src.metrics.confusion) {
      for (int v : row) rows += v;
    }
    CHECK(static_cast<std::size_t>(rows) == src.samples);
  }

  auto partial = group;
  partial.erase("disgust");
  const std::vector<CompositeSource> broken = {{"first", five, a, partial}};
  CHECK_THROWS_AS(composite_evaluate(broken, CompositeProtocol::kMegc2018), ConfigError);
  CHECK(parse_composite_protocol("megc2018") == CompositeProtocol::kMegc2018);
  CHECK_THROWS_AS(parse_composite_protocol("megc2020"), ConfigError);
}
