#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "elbptop/codes.hpp"
#include "elbptop/encoding.hpp"
#include "elbptop/volume.hpp"

namespace elbptop {

// Everything that determines one histogram feature.
struct DescriptorConfig {
  CodeKind kind = CodeKind::kLbp;
  NeighborSpec neighbors;
  Encoding encoding = Encoding::kFull;
  PlaneSet planes = PlaneSet::top();
  BlockGrid grid;

  int bins() const { return encoding_bins(encoding, neighbors.points); }
  // m * q * l * |planes| * bins
  std::size_t dimension() const;
  void validate() const;
  // Compact single-token description, e.g. "lbp;r=1;p=8;d=0;enc=full;planes=TOP;blocks=8x8x2".
  std::string layout() const;

  bool operator==(const DescriptorConfig&) const = default;
};

// Concatenated per-(plane, block) histograms in (plane, block, bin) order.
// Blocks are numbered x-fastest: block = bx + m * (by + q * bt). Every
// segment sums to one unless its block held no valid center.
struct DescriptorHistogram {
  std::vector<double> values;
  DescriptorConfig config;

  std::size_t segment_offset(std::size_t plane_slot, int block) const;
};

// Valid centers: along every axis sampled by at least one plane of the set,
// positions closer than ceil(r) to either end are skipped. Blocks partition
// that region using each center's (x, y, t) position in the volume.
// Throws BorderError naming the axis when the volume is too small.
DescriptorHistogram extract_descriptor(const VideoVolume& volume, const DescriptorConfig& config);

// Plain concatenation in input order. Throws ConfigError for an empty list.
std::vector<double> fuse_concat(std::span<const std::vector<double>> parts);

}  // namespace elbptop
