#include "elbptop/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "elbptop/error.hpp"

namespace elbptop {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

BinarySvm train_binary_svm(const Eigen::MatrixXd& rows, std::span<const int> signs, double c,
                           const SvmOptions& options) {
  const Eigen::Index n = rows.rows();
  if (static_cast<std::size_t>(n) != signs.size()) throw ShapeError("label count does not match row count");
  if (!(c > 0.0)) throw ConfigError("SVM penalty must be positive");
  if (n == 0) throw ProtocolError("SVM training set is empty");

  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = signs[static_cast<std::size_t>(i)] > 0 ? 1.0 : -1.0;

  // Q_ij = y_i y_j <x_i, x_j>
  const Eigen::MatrixXd kernel = rows * rows.transpose();
  const Eigen::MatrixXd q = y.asDiagonal() * kernel * y.asDiagonal();

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  const double eps = options.tolerance;
  const long max_iter = options.max_iterations > 0 ? options.max_iterations
                                                   : std::max<long>(10'000'000L, 100L * static_cast<long>(n));

  auto is_upper = [&](Eigen::Index t) { return alpha(t) >= c; };
  auto is_lower = [&](Eigen::Index t) { return alpha(t) <= 0.0; };

  BinarySvm model;
  long iter = 0;
  for (; iter < max_iter; ++iter) {
    // Maximal violating i, then j minimizing the second-order objective decrease.
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y(t) > 0) {
        if (!is_upper(t) && -grad(t) >= gmax) gmax = -grad(t), i = t;
      } else {
        if (!is_lower(t) && grad(t) >= gmax) gmax = grad(t), i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y(t) > 0) {
        if (is_lower(t)) continue;
        const double diff = gmax + grad(t);
        gmax2 = std::max(gmax2, grad(t));
        if (diff > 0 && i >= 0) {
          double quad = q(i, i) + q(t, t) - 2.0 * y(i) * q(i, t);
          if (quad <= 0) quad = kTau;
          const double obj = -(diff * diff) / quad;
          if (obj <= best) best = obj, j = t;
        }
      } else {
        if (is_upper(t)) continue;
        const double diff = gmax - grad(t);
        gmax2 = std::max(gmax2, -grad(t));
        if (diff > 0 && i >= 0) {
          double quad = q(i, i) + q(t, t) + 2.0 * y(i) * q(i, t);
          if (quad <= 0) quad = kTau;
          const double obj = -(diff * diff) / quad;
          if (obj <= best) best = obj, j = t;
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < eps) break;

    const double old_i = alpha(i);
    const double old_j = alpha(j);
    if (y(i) != y(j)) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) alpha(j) = 0, alpha(i) = diff;
      } else {
        if (alpha(i) < 0) alpha(i) = 0, alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > c) alpha(i) = c, alpha(j) = c - diff;
      } else {
        if (alpha(j) > c) alpha(j) = c, alpha(i) = c + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) alpha(i) = c, alpha(j) = sum - c;
      } else {
        if (alpha(j) < 0) alpha(j) = 0, alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) alpha(j) = c, alpha(i) = sum - c;
      } else {
        if (alpha(i) < 0) alpha(i) = 0, alpha(j) = sum;
      }
    }
    const double di = alpha(i) - old_i;
    const double dj = alpha(j) - old_j;
    grad += q.col(i) * di + q.col(j) * dj;
  }
  model.iterations = iter;
  model.converged = iter < max_iter;

  // Offset from free vectors, or the midpoint of the feasible interval.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  int free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (is_upper(t)) {
      if (y(t) < 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (is_lower(t)) {
      if (y(t) > 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / free_count : (upper + lower) / 2.0;

  model.weights = rows.transpose() * (alpha.cwiseProduct(y));
  model.bias = -rho;
  return model;
}

LinearSvm LinearSvm::train(const Eigen::MatrixXd& rows, std::span<const int> labels, int num_classes, double c,
                           const SvmOptions& options) {
  if (static_cast<std::size_t>(rows.rows()) != labels.size()) throw ShapeError("label count does not match row count");
  if (!(c > 0.0)) throw ConfigError("SVM penalty must be positive");
  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) throw ProtocolError("label outside the declared class set");
    members[static_cast<std::size_t>(labels[i])].push_back(static_cast<Eigen::Index>(i));
  }
  std::vector<int> present;
  for (int k = 0; k < num_classes; ++k) {
    if (!members[static_cast<std::size_t>(k)].empty()) present.push_back(k);
  }
  if (present.size() < 2) throw ProtocolError("SVM training needs at least two classes, got " + std::to_string(present.size()));

  LinearSvm model;
  model.num_classes_ = num_classes;
  for (std::size_t a = 0; a < present.size(); ++a) {
    for (std::size_t b = a + 1; b < present.size(); ++b) {
      const auto& pos = members[static_cast<std::size_t>(present[a])];
      const auto& neg = members[static_cast<std::size_t>(present[b])];
      Eigen::MatrixXd sub(static_cast<Eigen::Index>(pos.size() + neg.size()), rows.cols());
      std::vector<int> signs;
      Eigen::Index r = 0;
      for (Eigen::Index idx : pos) sub.row(r++) = rows.row(idx), signs.push_back(1);
      for (Eigen::Index idx : neg) sub.row(r++) = rows.row(idx), signs.push_back(-1);
      model.pairs_.push_back({present[a], present[b], train_binary_svm(sub, signs, c, options)});
    }
  }
  return model;
}

int LinearSvm::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::vector<int> votes(static_cast<std::size_t>(num_classes_), 0);
  std::vector<double> sums(static_cast<std::size_t>(num_classes_), 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(num_classes_), false);
  for (const PairModel& pair : pairs_) {
    const double value = pair.svm.decision(x);
    ++votes[static_cast<std::size_t>(value > 0 ? pair.positive : pair.negative)];
    sums[static_cast<std::size_t>(pair.positive)] += value;
    sums[static_cast<std::size_t>(pair.negative)] -= value;
    seen[static_cast<std::size_t>(pair.positive)] = seen[static_cast<std::size_t>(pair.negative)] = true;
  }
  int best = -1;
  for (int k = 0; k < num_classes_; ++k) {
    if (!seen[static_cast<std::size_t>(k)]) continue;
    if (best < 0) {
      best = k;
      continue;
    }
    const auto ku = static_cast<std::size_t>(k);
    const auto bu = static_cast<std::size_t>(best);
    if (votes[ku] > votes[bu] || (votes[ku] == votes[bu] && sums[ku] > sums[bu])) best = k;
  }
  return best;
}

std::vector<int> LinearSvm::predict_rows(const Eigen::MatrixXd& rows) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out.push_back(predict(rows.row(i).transpose()));
  return out;
}

bool LinearSvm::converged() const {
  return std::all_of(pairs_.begin(), pairs_.end(), [](const PairModel& p) { return p.svm.converged; });
}

}  // namespace elbptop
