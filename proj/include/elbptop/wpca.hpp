#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

namespace elbptop {

// Rows are clips, columns are histogram bins or embedded components.
using FeatureMatrix = Eigen::MatrixXd;

struct WpcaModel {
  Eigen::VectorXd mean;         // d
  Eigen::MatrixXd basis;        // d x k, orthonormal columns
  Eigen::VectorXd eigenvalues;  // k, descending
  Eigen::VectorXd scales;       // k, 1 / sqrt(eigenvalue)

  Eigen::Index input_dimension() const { return mean.size(); }
  Eigen::Index components() const { return basis.cols(); }
};

// Relative floor below which eigen-components are dropped.
inline constexpr double kEigenvalueFloor = 1e-10;

// Fits mean, basis and whitening scales on the training rows through the
// n x n Gram matrix. `components` <= 0 means n - 1. Retains
// min(components, n - 1, #eigenvalues above the floor) components.
// Throws DegenerateDataError when every row is identical.
WpcaModel wpca_fit(const FeatureMatrix& train, int components = 0);

// ((row - mean) * basis) scaled per component. Throws ShapeError on a
// dimension mismatch.
FeatureMatrix wpca_transform(const WpcaModel& model, const FeatureMatrix& features);

// Stored in the feature-cache record format; values are 32-bit floats.
void save_wpca(const WpcaModel& model, const std::filesystem::path& path, const std::string& config_hash = "");
WpcaModel load_wpca(const std::filesystem::path& path);

}  // namespace elbptop
