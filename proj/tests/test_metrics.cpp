#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "elbptop/error.hpp"
#include "elbptop/metrics.hpp"

using namespace elbptop;

namespace {

struct HandMetrics {
  double pooled, mean_subject, uar, f1_macro, f1_weighted;
};

// Straight from the definitions, counting with maps instead of a matrix.
HandMetrics by_hand(const std::vector<int>& pred, const std::vector<int>& truth, const std::vector<std::string>& subj) {
  const double n = static_cast<double>(pred.size());
  std::map<int, int> tp, truth_count, pred_count;
  std::map<std::string, std::pair<double, double>> per_subject;
  int correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++truth_count[truth[i]];
    ++pred_count[pred[i]];
    if (pred[i] == truth[i]) ++tp[truth[i]], ++correct;
    per_subject[subj[i]].first += pred[i] == truth[i];
    per_subject[subj[i]].second += 1;
  }
  HandMetrics h{};
  h.pooled = correct / n;
  for (auto& [s, v] : per_subject) h.mean_subject += v.first / v.second / static_cast<double>(per_subject.size());
  std::set<int> classes;
  for (auto& [k, c] : truth_count) classes.insert(k);
  for (auto& [k, c] : pred_count) classes.insert(k);
  double f1_sum = 0.0;
  for (int k : classes) {
    const double r = truth_count.count(k) ? tp[k] / static_cast<double>(truth_count[k]) : 0.0;
    const double p = pred_count.count(k) ? tp[k] / static_cast<double>(pred_count[k]) : 0.0;
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    f1_sum += f;
    if (truth_count.count(k)) {
      h.uar += r / static_cast<double>(truth_count.size());
      h.f1_weighted += truth_count[k] / n * f;
    }
  }
  h.f1_macro = f1_sum / static_cast<double>(classes.size());
  return h;
}

}  // namespace

TEST_CASE("all-correct predictions score one everywhere") {
  const std::vector<int> y = {0, 1, 2, 2, 1, 0};
  const std::vector<std::string> s = {"a", "a", "b", "b", "c", "c"};
  const Metrics m = compute_metrics(y, y, s, 3);
  CHECK(m.mean_accuracy == 1.0);
  CHECK(m.pooled_accuracy == 1.0);
  CHECK(m.f1_macro == 1.0);
  CHECK(m.f1_weighted == 1.0);
  CHECK(m.uar == 1.0);
}

TEST_CASE("predicting one class on a balanced two-class set") {
  const std::vector<int> pred = {0, 0, 0, 0};
  const std::vector<int> truth = {0, 0, 1, 1};
  const std::vector<std::string> s(4, "x");
  const Metrics m = compute_metrics(pred, truth, s, 2);
  CHECK(m.uar == doctest::Approx(0.5));
  CHECK(m.f1_macro == doctest::Approx(1.0 / 3.0));
  CHECK(m.precision[1] == 0.0);
  CHECK(m.confusion[1][0] == 2);
}

TEST_CASE("mean accuracy averages subjects, not samples") {
  const std::vector<int> pred = {0, 1, 0, 1, 0, 0};
  const std::vector<int> truth = {0, 1, 0, 1, 1, 0};
  const std::vector<std::string> s = {"a", "a", "b", "b", "b", "b"};
  // a: 2/2, b: 3/4 -> 0.875; pooled 5/6
  const Metrics m = compute_metrics(pred, truth, s, 2);
  CHECK(m.mean_accuracy == doctest::Approx(0.875));
  CHECK(m.pooled_accuracy == doctest::Approx(5.0 / 6.0));

  const std::vector<int> p2 = {1, 1, 0, 1};
  const std::vector<int> t2 = {1, 1, 1, 1};
  const std::vector<std::string> s2 = {"a", "b", "b", "a"};
  // a: 1.0, b: 0.5
  CHECK(compute_metrics(p2, t2, s2, 2).mean_accuracy == doctest::Approx(0.75));
}

TEST_CASE("metrics agree with hand formulas on random sets") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int classes = 2 + static_cast<int>(rng() % 4);
    const int n = 1 + static_cast<int>(rng() % 60);
    std::vector<int> pred, truth;
    std::vector<std::string> subj;
    for (int i = 0; i < n; ++i) {
      truth.push_back(static_cast<int>(rng() % static_cast<unsigned>(classes)));
      pred.push_back(rng() % 3 == 0 ? truth.back() : static_cast<int>(rng() % static_cast<unsigned>(classes)));
      subj.push_back("s" + std::to_string(rng() % 5));
    }
    const Metrics m = compute_metrics(pred, truth, subj, classes);
    const HandMetrics h = by_hand(pred, truth, subj);
    CHECK(m.pooled_accuracy == doctest::Approx(h.pooled).epsilon(1e-12));
    CHECK(m.mean_accuracy == doctest::Approx(h.mean_subject).epsilon(1e-12));
    CHECK(m.uar == doctest::Approx(h.uar).epsilon(1e-12));
    CHECK(m.f1_macro == doctest::Approx(h.f1_macro).epsilon(1e-12));
    CHECK(m.f1_weighted == doctest::Approx(h.f1_weighted).epsilon(1e-12));
    int total = 0;
    for (int k = 0; k < classes; ++k) {
      int row = 0;
      for (int j = 0; j < classes; ++j) row += m.confusion[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      CHECK(row == m.support[static_cast<std::size_t>(k)]);
      total += row;
    }
    CHECK(total == n);
  }
}

TEST_CASE("metric argument checks") {
  const std::vector<int> none;
  const std::vector<std::string> no_subjects;
  CHECK_THROWS_AS(compute_metrics(none, none, no_subjects, 2), ProtocolError);
  const std::vector<int> a = {0, 1}, b = {0};
  const std::vector<std::string> s = {"x", "y"};
  CHECK_THROWS_AS(compute_metrics(a, b, s, 2), ShapeError);
  const std::vector<int> bad = {0, 5};
  CHECK_THROWS_AS(compute_metrics(bad, a, s, 2), ProtocolError);
}
