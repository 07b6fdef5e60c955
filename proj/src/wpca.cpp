#include "elbptop/wpca.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "elbptop/cache.hpp"
#include "elbptop/error.hpp"

namespace elbptop {

WpcaModel wpca_fit(const FeatureMatrix& train, int components) {
  const Eigen::Index n = train.rows();
  const Eigen::Index d = train.cols();
  if (n < 2) throw DegenerateDataError("whitened PCA needs at least two training rows");
  if (d < 1) throw ShapeError("whitened PCA needs at least one feature column");

  WpcaModel model;
  model.mean = train.colwise().mean().transpose();
  const Eigen::MatrixXd centered = train.rowwise() - model.mean.transpose();

  const double scale = 1.0 + train.cwiseAbs().maxCoeff();
  if (centered.cwiseAbs().maxCoeff() <= 1e-12 * scale) {
    throw DegenerateDataError("all training rows are identical (rank 0)");
  }

  // Covariance (1/(n-1)) X^T X shares its nonzero spectrum with the Gram
  // matrix (1/(n-1)) X X^T; eigenvectors map over as X^T v / sqrt((n-1) lambda).
  const double norm = static_cast<double>(n - 1);
  const Eigen::MatrixXd gram = (centered * centered.transpose()) / norm;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw DegenerateDataError("Gram eigen-decomposition failed");

  const Eigen::VectorXd values = solver.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
  const double largest = values(0);
  if (!(largest > 0.0)) throw DegenerateDataError("training covariance has rank 0");

  Eigen::Index keep = n - 1;
  if (components > 0) keep = std::min<Eigen::Index>(keep, components);
  Eigen::Index above = 0;
  while (above < keep && values(above) >= kEigenvalueFloor * largest) ++above;
  keep = above;

  model.eigenvalues = values.head(keep);
  model.scales = model.eigenvalues.cwiseSqrt().cwiseInverse();
  model.basis.resize(d, keep);
  for (Eigen::Index i = 0; i < keep; ++i) {
    Eigen::VectorXd column = centered.transpose() * vectors.col(i);
    column /= std::sqrt(norm * values(i));
    Eigen::Index pivot = 0;
    column.cwiseAbs().maxCoeff(&pivot);
    if (column(pivot) < 0.0) column = -column;
    model.basis.col(i) = column;
  }
  return model;
}

FeatureMatrix wpca_transform(const WpcaModel& model, const FeatureMatrix& features) {
  if (features.cols() != model.input_dimension()) {
    throw ShapeError("feature dimension " + std::to_string(features.cols()) + " does not match model dimension " +
                     std::to_string(model.input_dimension()));
  }
  FeatureMatrix projected = (features.rowwise() - model.mean.transpose()) * model.basis;
  return projected * model.scales.asDiagonal();
}

void save_wpca(const WpcaModel& model, const std::filesystem::path& path, const std::string& config_hash) {
  const Eigen::Index d = model.input_dimension();
  const Eigen::Index k = model.components();
  CacheRecord record;
  record.layout = "wpca;d=" + std::to_string(d) + ";k=" + std::to_string(k);
  record.config_hash = config_hash.empty() ? "none" : config_hash;
  record.values.reserve(static_cast<std::size_t>(d + k + d * k));
  for (Eigen::Index i = 0; i < d; ++i) record.values.push_back(static_cast<float>(model.mean(i)));
  for (Eigen::Index i = 0; i < k; ++i) record.values.push_back(static_cast<float>(model.eigenvalues(i)));
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) record.values.push_back(static_cast<float>(model.basis(r, c)));
  }
  write_record(path, record);
}

WpcaModel load_wpca(const std::filesystem::path& path) {
  const CacheRecord record = read_record(path);
  long long d = 0;
  long long k = 0;
  if (std::sscanf(record.layout.c_str(), "wpca;d=%lld;k=%lld", &d, &k) != 2 || d < 1 || k < 0 ||
      record.values.size() != static_cast<std::size_t>(d + k + d * k)) {
    throw IngestError("not a whitened PCA record: " + path.string());
  }
  WpcaModel model;
  model.mean.resize(d);
  model.eigenvalues.resize(k);
  model.basis.resize(d, k);
  std::size_t at = 0;
  for (Eigen::Index i = 0; i < d; ++i) model.mean(i) = record.values[at++];
  for (Eigen::Index i = 0; i < k; ++i) model.eigenvalues(i) = record.values[at++];
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) model.basis(r, c) = record.values[at++];
  }
  model.scales = model.eigenvalues.cwiseSqrt().cwiseInverse();
  return model;
}

}  // namespace elbptop
