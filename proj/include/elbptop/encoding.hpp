#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "elbptop/codes.hpp"

namespace elbptop {

// full: all 2^p codes; u2: uniform codes + one nonuniform bin;
// ri: one bin per rotation orbit; riu2: p+1 uniform orbits + one nonuniform bin.
enum class Encoding { kFull, kUniform, kRotationInvariant, kRiu2 };

std::string_view to_string(Encoding encoding);
Encoding parse_encoding(std::string_view name);

// Number of 0/1 transitions around the cyclic p-bit string.
int bit_transitions(Code code, int points);
inline bool is_uniform(Code code, int points) { return bit_transitions(code, points) <= 2; }

// Smallest value among the p cyclic rotations of `code`.
Code rotation_minimum(Code code, int points);

// Lookup table from raw code to histogram bin. Immutable once built.
class EncodingTable {
 public:
  // Throws ConfigError for p outside [2, 16].
  static EncodingTable build(Encoding encoding, int points);

  Encoding encoding() const { return encoding_; }
  int points() const { return points_; }
  int bins() const { return bins_; }

  std::uint32_t operator[](Code code) const { return map_[code]; }
  std::span<const std::uint32_t> map() const { return map_; }

 private:
  EncodingTable(Encoding encoding, int points, int bins, std::vector<std::uint32_t> map)
      : encoding_(encoding), points_(points), bins_(bins), map_(std::move(map)) {}

  Encoding encoding_;
  int points_;
  int bins_;
  std::vector<std::uint32_t> map_;
};

// Bin count of `encoding` at p points without materializing the table.
int encoding_bins(Encoding encoding, int points);

}  // namespace elbptop
