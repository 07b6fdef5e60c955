#include "elbptop/codes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "elbptop/error.hpp"

namespace elbptop {

namespace {

constexpr double kLatticeSnap = 1e-9;

double snap(double value) {
  const double nearest = std::round(value);
  return std::abs(value - nearest) < kLatticeSnap ? nearest : value;
}

// Differences within rounding noise of zero count as ties, and ties set the bit.
constexpr double kTieTolerance = 1e-12;

inline Code sign_bit(double a, double b, int n) {
  return a - b >= -kTieTolerance * (std::abs(a) + std::abs(b)) ? (Code{1} << n) : Code{0};
}

}  // namespace

std::string_view to_string(CodeKind kind) {
  switch (kind) {
    case CodeKind::kLbp:
      return "lbp";
    case CodeKind::kAdlbp:
      return "adlbp";
    case CodeKind::kRdlbp:
      return "rdlbp";
  }
  return "unknown";
}

CodeKind parse_code_kind(std::string_view name) {
  if (name == "lbp") return CodeKind::kLbp;
  if (name == "adlbp") return CodeKind::kAdlbp;
  if (name == "rdlbp") return CodeKind::kRdlbp;
  throw ConfigError("unknown code kind '" + std::string(name) + "'");
}

void NeighborSpec::validate() const {
  if (!(radius > 0.0)) throw ConfigError("neighbor radius must be positive");
  if (points < 2) throw ConfigError("neighbor count must be at least 2");
  if (points > 16) throw ConfigError("neighbor count above 16 is not supported");
  if (!(delta >= 0.0) || delta > radius) throw ConfigError("radial gap must lie in [0, radius]");
}

int NeighborSpec::margin() const { return static_cast<int>(std::ceil(radius - kLatticeSnap)); }

double PlaneView::interpolate(double u, double v) const {
  const int u0 = static_cast<int>(std::floor(u));
  const int v0 = static_cast<int>(std::floor(v));
  const double fu = u - u0;
  const double fv = v - v0;
  return detail::blend(origin_ + u0 * stride_u_ + v0 * stride_v_, stride_u_, stride_v_, fu, fv);
}

std::vector<RingOffset> ring_offsets(double radius, int points) {
  std::vector<RingOffset> offsets;
  offsets.reserve(static_cast<std::size_t>(points));
  for (int n = 0; n < points; ++n) {
    const double angle = 2.0 * std::numbers::pi * n / points;
    offsets.push_back({snap(radius * std::cos(angle)), snap(-radius * std::sin(angle))});
  }
  return offsets;
}

std::vector<double> sample_ring(const PlaneView& plane, double cu, double cv, double radius,
                                int points) {
  if (points < 1) throw ConfigError("ring needs at least one point");
  if (radius < 0.0) throw ConfigError("ring radius must be non-negative");
  const double slack = kLatticeSnap;
  if (cu - radius < -slack || cv - radius < -slack || cu + radius > plane.width() - 1 + slack ||
      cv + radius > plane.height() - 1 + slack) {
    throw BorderError("ring of radius " + std::to_string(radius) + " around (" +
                      std::to_string(cu) + ", " + std::to_string(cv) + ") leaves the " +
                      std::to_string(plane.width()) + "x" + std::to_string(plane.height()) +
                      " plane");
  }
  std::vector<double> ring;
  ring.reserve(static_cast<std::size_t>(points));
  for (const RingOffset& off : ring_offsets(radius, points)) {
    const double u = std::clamp(snap(cu + off.du), 0.0, plane.width() - 1.0);
    const double v = std::clamp(snap(cv + off.dv), 0.0, plane.height() - 1.0);
    ring.push_back(plane.interpolate(u, v));
  }
  return ring;
}

Code lbp_code(double center, std::span<const double> ring) {
  Code code = 0;
  for (std::size_t n = 0; n < ring.size(); ++n) code |= sign_bit(ring[n], center, static_cast<int>(n));
  return code;
}

Code adlbp_code(std::span<const double> ring) {
  const std::size_t p = ring.size();
  Code code = 0;
  for (std::size_t n = 0; n < p; ++n) {
    code |= sign_bit(ring[(n + 1) % p], ring[n], static_cast<int>(n));
  }
  return code;
}

Code rdlbp_code(std::span<const double> outer, std::span<const double> inner) {
  if (outer.size() != inner.size()) throw ShapeError("radial rings differ in length");
  Code code = 0;
  for (std::size_t n = 0; n < outer.size(); ++n) {
    code |= sign_bit(outer[n], inner[n], static_cast<int>(n));
  }
  return code;
}

}  // namespace elbptop
