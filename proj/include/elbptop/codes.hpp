#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace elbptop {

using Code = std::uint32_t;

enum class CodeKind { kLbp, kAdlbp, kRdlbp };

std::string_view to_string(CodeKind kind);
CodeKind parse_code_kind(std::string_view name);

// Circular sampling geometry of one binary code. `delta` is the radial gap
// between the outer ring (radius) and the inner ring (radius - delta); only
// the radial-difference code reads the inner ring.
struct NeighborSpec {
  double radius = 1.0;
  int points = 8;
  double delta = 0.0;

  double inner_radius() const { return radius - delta; }

  // Throws ConfigError when r <= 0, p < 2, p > 16 or delta outside [0, r].
  void validate() const;

  // Largest integer distance from the center touched by any sample.
  int margin() const;

  bool operator==(const NeighborSpec&) const = default;
};

namespace detail {

// Bilinear blend of the cell whose top-left sample is p[0]; both fractions
// lie in [0, 1). Zero fractions skip the neighbor reads.
inline double blend(const double* p, std::ptrdiff_t su, std::ptrdiff_t sv, double fu, double fv) {
  if (fv == 0.0) {
    if (fu == 0.0) return p[0];
    return p[0] + fu * (p[su] - p[0]);
  }
  if (fu == 0.0) return p[0] + fv * (p[sv] - p[0]);
  const double top = p[0] + fu * (p[su] - p[0]);
  const double bottom = p[sv] + fu * (p[sv + su] - p[sv]);
  return top + fv * (bottom - top);
}

}  // namespace detail

// Read-only strided 2-D view. `u` is the horizontal axis, `v` the vertical
// one (pointing down, like image rows).
class PlaneView {
 public:
  PlaneView() = default;
  PlaneView(const double* origin, int width, int height, std::ptrdiff_t stride_u,
            std::ptrdiff_t stride_v)
      : origin_(origin), width_(width), height_(height), stride_u_(stride_u), stride_v_(stride_v) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::ptrdiff_t stride_u() const { return stride_u_; }
  std::ptrdiff_t stride_v() const { return stride_v_; }
  const double* origin() const { return origin_; }

  double at(int u, int v) const { return origin_[u * stride_u_ + v * stride_v_]; }

  // Bilinear interpolation; exact at lattice points. The caller keeps (u, v)
  // inside [0, width-1] x [0, height-1].
  double interpolate(double u, double v) const;

 private:
  const double* origin_ = nullptr;
  int width_ = 0;
  int height_ = 0;
  std::ptrdiff_t stride_u_ = 1;
  std::ptrdiff_t stride_v_ = 0;
};

// Offset of ring point n relative to the center: (r cos(2 pi n / p), -r sin(2 pi n / p)),
// with coordinates within 1e-9 of an integer snapped onto the lattice.
struct RingOffset {
  double du;
  double dv;
};
std::vector<RingOffset> ring_offsets(double radius, int points);

// Samples p ring points around (cu, cv). Throws BorderError when the ring
// leaves the plane.
std::vector<double> sample_ring(const PlaneView& plane, double cu, double cv, double radius,
                                int points);

// Bit n is s(a - b) = [a >= b]; differences within 1e-12 of |a| + |b| are
// treated as ties so rounding cannot flip symmetric samples.
Code lbp_code(double center, std::span<const double> ring);
Code adlbp_code(std::span<const double> ring);
Code rdlbp_code(std::span<const double> outer, std::span<const double> inner);

}  // namespace elbptop
