#include "elbptop/descriptor.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "elbptop/error.hpp"

namespace elbptop {

namespace {

struct AxisRegion {
  int lo = 0;
  int hi = 0;                // exclusive
  std::vector<int> block;    // block index per position, -1 outside [lo, hi)
};

AxisRegion make_axis(int extent, bool sampled, int margin, int blocks) {
  AxisRegion axis;
  axis.lo = sampled ? margin : 0;
  axis.hi = sampled ? extent - margin : extent;
  axis.block.assign(static_cast<std::size_t>(extent), -1);
  const std::vector<int> local = partition_axis(axis.hi - axis.lo, blocks);
  for (int i = axis.lo; i < axis.hi; ++i) axis.block[static_cast<std::size_t>(i)] = local[static_cast<std::size_t>(i - axis.lo)];
  return axis;
}

// Ring point resolved against a plane's strides: lattice cell offset plus fractions.
struct Tap {
  std::ptrdiff_t offset;
  double fu;
  double fv;
};

std::vector<Tap> make_taps(double radius, int points, std::ptrdiff_t su, std::ptrdiff_t sv) {
  std::vector<Tap> taps;
  for (const RingOffset& off : ring_offsets(radius, points)) {
    const double u0 = std::floor(off.du);
    const double v0 = std::floor(off.dv);
    taps.push_back({static_cast<std::ptrdiff_t>(u0) * su + static_cast<std::ptrdiff_t>(v0) * sv, off.du - u0,
                    off.dv - v0});
  }
  return taps;
}

inline void read_ring(const double* center, const std::vector<Tap>& taps, std::ptrdiff_t su, std::ptrdiff_t sv,
                      double* out) {
  for (std::size_t n = 0; n < taps.size(); ++n) {
    out[n] = detail::blend(center + taps[n].offset, su, sv, taps[n].fu, taps[n].fv);
  }
}

}  // namespace

std::size_t DescriptorConfig::dimension() const {
  return static_cast<std::size_t>(grid.count()) * planes.size() * static_cast<std::size_t>(bins());
}

void DescriptorConfig::validate() const {
  neighbors.validate();
  grid.validate();
  if (planes.empty()) throw ConfigError("descriptor plane set is empty");
  if (kind != CodeKind::kRdlbp && neighbors.delta != 0.0) {
    throw ConfigError("radial gap is only meaningful for rdlbp");
  }
}

std::string DescriptorConfig::layout() const {
  std::ostringstream out;
  out << to_string(kind) << ";r=" << neighbors.radius << ";p=" << neighbors.points << ";d=" << neighbors.delta
      << ";enc=" << to_string(encoding) << ";planes=" << planes.name() << ";blocks=" << grid.m << 'x' << grid.q
      << 'x' << grid.l << ";bins=" << bins();
  return out.str();
}

std::size_t DescriptorHistogram::segment_offset(std::size_t plane_slot, int block) const {
  const std::size_t bins = static_cast<std::size_t>(config.bins());
  return (plane_slot * static_cast<std::size_t>(config.grid.count()) + static_cast<std::size_t>(block)) * bins;
}

DescriptorHistogram extract_descriptor(const VideoVolume& volume, const DescriptorConfig& config) {
  config.validate();
  const int margin = config.neighbors.margin();
  const int need = 2 * margin + 1;
  const PlaneSet& planes = config.planes;
  const std::array<std::pair<const char*, std::pair<bool, int>>, 3> axes{{
      {"x", {planes.samples_x(), volume.width()}},
      {"y", {planes.samples_y(), volume.height()}},
      {"t", {planes.samples_t(), volume.length()}},
  }};
  for (const auto& [name, info] : axes) {
    if (info.first && info.second < need) {
      throw BorderError(std::string("volume axis ") + name + " has extent " + std::to_string(info.second) +
                        ", radius " + std::to_string(config.neighbors.radius) + " needs at least " +
                        std::to_string(need));
    }
  }

  const AxisRegion ax = make_axis(volume.width(), planes.samples_x(), margin, config.grid.m);
  const AxisRegion ay = make_axis(volume.height(), planes.samples_y(), margin, config.grid.q);
  const AxisRegion at = make_axis(volume.length(), planes.samples_t(), margin, config.grid.l);

  const EncodingTable table = EncodingTable::build(config.encoding, config.neighbors.points);
  const int points = config.neighbors.points;
  const int bins = table.bins();
  const int blocks = config.grid.count();
  const int m = config.grid.m;
  const int q = config.grid.q;

  DescriptorHistogram hist;
  hist.config = config;
  hist.values.assign(config.dimension(), 0.0);

  std::vector<double> outer(static_cast<std::size_t>(points));
  std::vector<double> inner(static_cast<std::size_t>(points));
  std::vector<double> totals(static_cast<std::size_t>(blocks));

  const std::vector<Plane> plane_list = planes.planes();
  for (std::size_t slot = 0; slot < plane_list.size(); ++slot) {
    const Plane plane = plane_list[slot];
    std::fill(totals.begin(), totals.end(), 0.0);
    double* segment_base = hist.values.data() + hist.segment_offset(slot, 0);

    for (const PlaneSlice& slice : slice_planes(volume, PlaneSet(plane == Plane::kXY, plane == Plane::kXT,
                                                                 plane == Plane::kYT))) {
      // Slice axes (u, v) and the fixed axis, as volume axes.
      const AxisRegion& au = plane == Plane::kYT ? ay : ax;
      const AxisRegion& av = plane == Plane::kXY ? ay : at;
      const AxisRegion& af = plane == Plane::kXY ? at : (plane == Plane::kXT ? ay : ax);
      const int fixed_block = af.block[static_cast<std::size_t>(slice.fixed)];
      if (fixed_block < 0) continue;

      const std::ptrdiff_t su = slice.view.stride_u();
      const std::ptrdiff_t sv = slice.view.stride_v();
      const std::vector<Tap> outer_taps = make_taps(config.neighbors.radius, points, su, sv);
      const std::vector<Tap> inner_taps =
          config.kind == CodeKind::kRdlbp ? make_taps(config.neighbors.inner_radius(), points, su, sv)
                                          : std::vector<Tap>{};

      for (int v = av.lo; v < av.hi; ++v) {
        const int bv = av.block[static_cast<std::size_t>(v)];
        for (int u = au.lo; u < au.hi; ++u) {
          const int bu = au.block[static_cast<std::size_t>(u)];
          int bx = 0, by = 0, bt = 0;
          switch (plane) {
            case Plane::kXY:
              bx = bu, by = bv, bt = fixed_block;
              break;
            case Plane::kXT:
              bx = bu, by = fixed_block, bt = bv;
              break;
            case Plane::kYT:
              bx = fixed_block, by = bu, bt = bv;
              break;
          }
          const int block = bx + m * (by + q * bt);
          const double* center = slice.view.origin() + u * su + v * sv;

          read_ring(center, outer_taps, su, sv, outer.data());
          Code code = 0;
          switch (config.kind) {
            case CodeKind::kLbp:
              code = lbp_code(*center, outer);
              break;
            case CodeKind::kAdlbp:
              code = adlbp_code(outer);
              break;
            case CodeKind::kRdlbp:
              read_ring(center, inner_taps, su, sv, inner.data());
              code = rdlbp_code(outer, inner);
              break;
          }
          segment_base[static_cast<std::size_t>(block) * bins + table[code]] += 1.0;
          totals[static_cast<std::size_t>(block)] += 1.0;
        }
      }
    }

    for (int b = 0; b < blocks; ++b) {
      const double total = totals[static_cast<std::size_t>(b)];
      if (total == 0.0) continue;
      double* seg = segment_base + static_cast<std::size_t>(b) * bins;
      for (int k = 0; k < bins; ++k) seg[k] /= total;
    }
  }
  return hist;
}

std::vector<double> fuse_concat(std::span<const std::vector<double>> parts) {
  if (parts.empty()) throw ConfigError("nothing to fuse");
  std::size_t total = 0;
  for (const auto& part : parts) total += part.size();
  std::vector<double> fused;
  fused.reserve(total);
  for (const auto& part : parts) fused.insert(fused.end(), part.begin(), part.end());
  return fused;
}

}  // namespace elbptop
