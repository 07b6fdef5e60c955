#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "elbptop/error.hpp"
#include "elbptop/preprocess.hpp"

namespace elbptop {

// Eigenvectors of the unnormalized path-graph Laplacian on n nodes are
// cos(pi k (j + 1/2) / n); evaluating them at a real j traces the curve.
double path_graph_basis(int k, int n, double position) {
  return std::cos(std::numbers::pi * k * (position + 0.5) / n);
}

VideoVolume tim_interpolate(const VideoVolume& volume, const TimParams& params) {
  if (params.target_length < 2) throw ConfigError("temporal interpolation target length must be at least 2");
  const int n = volume.length();
  if (n < 2) {
    throw PreprocessError("clip '" + volume.clip_id + "' has a single frame; temporal interpolation needs two");
  }
  const Eigen::Index pixels = static_cast<Eigen::Index>(volume.frame_size());

  // Frames as rows.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> frames(
      volume.data().data(), n, pixels);
  const Eigen::RowVectorXd mean = frames.colwise().mean();
  const Eigen::MatrixXd centered = frames.rowwise() - mean;

  Eigen::MatrixXd curve(n, n - 1);
  for (int j = 0; j < n; ++j) {
    for (int k = 1; k < n; ++k) curve(j, k - 1) = path_graph_basis(k, n, j);
  }
  const Eigen::MatrixXd mapping = curve.householderQr().solve(centered);

  const int target = params.target_length;
  VideoVolume out(volume.width(), volume.height(), target);
  out.copy_metadata_from(volume);
  Eigen::RowVectorXd coords(n - 1);
  for (int j = 0; j < target; ++j) {
    const double position = static_cast<double>(j) * (n - 1) / (target - 1);
    for (int k = 1; k < n; ++k) coords(k - 1) = path_graph_basis(k, n, position);
    const Eigen::RowVectorXd frame = mean + coords * mapping;
    std::copy(frame.data(), frame.data() + pixels, out.frame(j));
  }
  return out;
}

}  // namespace elbptop
