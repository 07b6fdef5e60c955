#include "elbptop/volume.hpp"

#include <algorithm>
#include <string>

#include "elbptop/error.hpp"

namespace elbptop {

VideoVolume::VideoVolume(int width, int height, int length, double fill)
    : width_(width), height_(height), length_(length) {
  if (width < 1 || height < 1 || length < 1) {
    throw ShapeError("volume dimensions must be positive, got " + std::to_string(width) + "x" +
                     std::to_string(height) + "x" + std::to_string(length));
  }
  data_.assign(static_cast<std::size_t>(width) * height * length, fill);
}

void VideoVolume::copy_metadata_from(const VideoVolume& other) {
  clip_id = other.clip_id;
  subject_id = other.subject_id;
  label = other.label;
  dataset_id = other.dataset_id;
}

std::string_view to_string(Plane plane) {
  switch (plane) {
    case Plane::kXY:
      return "XY";
    case Plane::kXT:
      return "XT";
    case Plane::kYT:
      return "YT";
  }
  return "?";
}

PlaneSet PlaneSet::parse(std::string_view name) {
  if (name == "TOP") return {true, true, true};
  if (name == "XYOT") return {false, true, true};
  if (name == "XOT") return {false, true, false};
  if (name == "YOT") return {false, false, true};
  if (name == "XY") return {true, false, false};
  PlaneSet set;
  std::size_t start = 0;
  while (start <= name.size()) {
    const std::size_t comma = name.find(',', start);
    const std::string_view token = name.substr(start, comma == std::string_view::npos ? name.npos : comma - start);
    if (token == "XY") {
      set.xy_ = true;
    } else if (token == "XT") {
      set.xt_ = true;
    } else if (token == "YT") {
      set.yt_ = true;
    } else {
      throw ConfigError("unknown plane '" + std::string(token) + "' in plane set '" + std::string(name) + "'");
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return set;
}

bool PlaneSet::contains(Plane plane) const {
  switch (plane) {
    case Plane::kXY:
      return xy_;
    case Plane::kXT:
      return xt_;
    case Plane::kYT:
      return yt_;
  }
  return false;
}

std::vector<Plane> PlaneSet::planes() const {
  std::vector<Plane> out;
  if (xy_) out.push_back(Plane::kXY);
  if (xt_) out.push_back(Plane::kXT);
  if (yt_) out.push_back(Plane::kYT);
  return out;
}

std::string PlaneSet::name() const {
  if (xy_ && xt_ && yt_) return "TOP";
  if (!xy_ && xt_ && yt_) return "XYOT";
  if (!xy_ && xt_ && !yt_) return "XOT";
  if (!xy_ && !xt_ && yt_) return "YOT";
  if (xy_ && !xt_ && !yt_) return "XY";
  std::string out;
  for (Plane p : planes()) {
    if (!out.empty()) out += ',';
    out += to_string(p);
  }
  return out;
}

void BlockGrid::validate() const {
  if (m < 1 || q < 1 || l < 1) {
    throw ConfigError("block grid must be at least 1x1x1, got " + std::to_string(m) + "x" +
                      std::to_string(q) + "x" + std::to_string(l));
  }
}

std::vector<PlaneSlice> slice_planes(const VideoVolume& volume, const PlaneSet& planes) {
  if (planes.empty()) throw ConfigError("plane set is empty");
  const int w = volume.width();
  const int h = volume.height();
  const int len = volume.length();
  const std::ptrdiff_t frame = static_cast<std::ptrdiff_t>(volume.frame_size());
  const double* base = volume.data().data();

  std::vector<PlaneSlice> slices;
  if (planes.contains(Plane::kXY)) {
    for (int t = 0; t < len; ++t) slices.push_back({Plane::kXY, t, PlaneView(base + t * frame, w, h, 1, w)});
  }
  if (planes.contains(Plane::kXT)) {
    for (int y = 0; y < h; ++y) {
      slices.push_back({Plane::kXT, y, PlaneView(base + static_cast<std::ptrdiff_t>(y) * w, w, len, 1, frame)});
    }
  }
  if (planes.contains(Plane::kYT)) {
    for (int x = 0; x < w; ++x) slices.push_back({Plane::kYT, x, PlaneView(base + x, h, len, w, frame)});
  }
  return slices;
}

std::vector<int> partition_axis(int extent, int blocks) {
  std::vector<int> index(static_cast<std::size_t>(std::max(extent, 0)));
  if (extent <= 0) return index;
  const int base = extent / blocks;
  const int longer = extent % blocks;
  int pos = 0;
  for (int b = 0; b < blocks; ++b) {
    const int len = base + (b >= blocks - longer ? 1 : 0);
    for (int i = 0; i < len; ++i) index[static_cast<std::size_t>(pos++)] = b;
  }
  return index;
}

}  // namespace elbptop
