#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "elbptop/codes.hpp"

namespace elbptop {

// Grayscale clip stored x-fastest: index = x + width * (y + height * t).
// Intensities are reals on the 8-bit scale [0, 255] after ingestion.
class VideoVolume {
 public:
  VideoVolume() = default;
  VideoVolume(int width, int height, int length, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int length() const { return length_; }
  std::size_t frame_size() const { return static_cast<std::size_t>(width_) * height_; }
  std::size_t size() const { return data_.size(); }

  double& at(int x, int y, int t) { return data_[index(x, y, t)]; }
  double at(int x, int y, int t) const { return data_[index(x, y, t)]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double* frame(int t) { return data_.data() + static_cast<std::size_t>(t) * frame_size(); }
  const double* frame(int t) const { return data_.data() + static_cast<std::size_t>(t) * frame_size(); }

  std::size_t index(int x, int y, int t) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(width_) * (static_cast<std::size_t>(y) + static_cast<std::size_t>(height_) * t);
  }

  // Copies metadata only.
  void copy_metadata_from(const VideoVolume& other);

  std::string clip_id;
  std::string subject_id;
  std::string label;
  std::string dataset_id;

 private:
  int width_ = 0;
  int height_ = 0;
  int length_ = 0;
  std::vector<double> data_;
};

enum class Plane { kXY = 0, kXT = 1, kYT = 2 };

std::string_view to_string(Plane plane);

// Non-empty subset of the three orthogonal planes, iterated in XY, XT, YT order.
class PlaneSet {
 public:
  PlaneSet() = default;
  PlaneSet(bool xy, bool xt, bool yt) : xy_(xy), xt_(xt), yt_(yt) {}

  static PlaneSet top() { return {true, true, true}; }
  // Accepts TOP, XYOT, XOT, YOT, XY and comma lists such as "XY,YT".
  static PlaneSet parse(std::string_view name);

  bool contains(Plane plane) const;
  bool empty() const { return !(xy_ || xt_ || yt_); }
  std::size_t size() const { return static_cast<std::size_t>(xy_) + xt_ + yt_; }
  std::vector<Plane> planes() const;

  bool samples_x() const { return xy_ || xt_; }
  bool samples_y() const { return xy_ || yt_; }
  bool samples_t() const { return xt_ || yt_; }

  // Named combination when there is one, otherwise the comma list.
  std::string name() const;

  bool operator==(const PlaneSet&) const = default;

 private:
  bool xy_ = false;
  bool xt_ = false;
  bool yt_ = false;
};

struct BlockGrid {
  int m = 1;  // along x
  int q = 1;  // along y
  int l = 1;  // along t

  int count() const { return m * q * l; }
  void validate() const;
  bool operator==(const BlockGrid&) const = default;
};

// One 2-D slice of a volume. For XY the slice axes are (x, y) at fixed t,
// for XT (x, t) at fixed y, for YT (y, t) at fixed x.
struct PlaneSlice {
  Plane plane;
  int fixed;
  PlaneView view;
};

// Throws ConfigError for an empty plane set.
std::vector<PlaneSlice> slice_planes(const VideoVolume& volume, const PlaneSet& planes);

// Splits [0, extent) into `blocks` contiguous ranges; the last (extent % blocks)
// ranges are one element longer. Returns the block index of every position.
std::vector<int> partition_axis(int extent, int blocks);

}  // namespace elbptop
