#include <algorithm>
#include <cmath>
#include <string>

#include "elbptop/error.hpp"
#include "elbptop/preprocess.hpp"

namespace elbptop {

namespace {

struct AxisTap {
  int i0;
  int i1;
  double frac;
};

std::vector<AxisTap> axis_taps(int src, int dst) {
  std::vector<AxisTap> taps(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double pos = (i + 0.5) * scale - 0.5;
    pos = std::clamp(pos, 0.0, src - 1.0);
    const int i0 = static_cast<int>(std::floor(pos));
    const int i1 = std::min(i0 + 1, src - 1);
    taps[static_cast<std::size_t>(i)] = {i0, i1, pos - i0};
  }
  return taps;
}

}  // namespace

std::vector<double> resize_bilinear(std::span<const double> src, int width, int height, int new_width,
                                    int new_height) {
  if (width < 1 || height < 1 || new_width < 1 || new_height < 1) {
    throw ShapeError("resize dimensions must be positive");
  }
  if (src.size() != static_cast<std::size_t>(width) * height) throw ShapeError("resize source size mismatch");
  if (width == new_width && height == new_height) return {src.begin(), src.end()};

  const std::vector<AxisTap> xs = axis_taps(width, new_width);
  const std::vector<AxisTap> ys = axis_taps(height, new_height);
  std::vector<double> out(static_cast<std::size_t>(new_width) * new_height);
  for (int y = 0; y < new_height; ++y) {
    const AxisTap& ty = ys[static_cast<std::size_t>(y)];
    const double* r0 = src.data() + static_cast<std::size_t>(ty.i0) * width;
    const double* r1 = src.data() + static_cast<std::size_t>(ty.i1) * width;
    for (int x = 0; x < new_width; ++x) {
      const AxisTap& tx = xs[static_cast<std::size_t>(x)];
      const double top = r0[tx.i0] + tx.frac * (r0[tx.i1] - r0[tx.i0]);
      const double bottom = r1[tx.i0] + tx.frac * (r1[tx.i1] - r1[tx.i0]);
      out[static_cast<std::size_t>(y) * new_width + x] = top + ty.frac * (bottom - top);
    }
  }
  return out;
}

VideoVolume to_gray_resize(std::span<const Frame> frames, int width, int height) {
  if (frames.empty()) throw IngestError("no frames to convert");
  const int src_w = frames.front().width;
  const int src_h = frames.front().height;
  for (const Frame& f : frames) {
    if (f.width != src_w || f.height != src_h) {
      throw IngestError("mixed frame dimensions: " + std::to_string(src_w) + "x" + std::to_string(src_h) +
                        " vs " + std::to_string(f.width) + "x" + std::to_string(f.height));
    }
    if (f.channels != 1 && f.channels != 3) throw IngestError("frames must have 1 or 3 channels");
    if (f.pixels.size() != static_cast<std::size_t>(f.width) * f.height * f.channels) {
      throw IngestError("frame pixel buffer does not match its dimensions");
    }
  }

  VideoVolume volume(width, height, static_cast<int>(frames.size()));
  std::vector<double> gray(static_cast<std::size_t>(src_w) * src_h);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const Frame& f = frames[t];
    if (f.channels == 1) {
      std::copy(f.pixels.begin(), f.pixels.end(), gray.begin());
    } else {
      for (std::size_t i = 0; i < gray.size(); ++i) {
        const double* px = f.pixels.data() + 3 * i;
        gray[i] = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
      }
    }
    const std::vector<double> resized = resize_bilinear(gray, src_w, src_h, width, height);
    std::copy(resized.begin(), resized.end(), volume.frame(static_cast<int>(t)));
  }
  return volume;
}

}  // namespace elbptop
