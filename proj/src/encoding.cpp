#include "elbptop/encoding.hpp"

#include <bit>
#include <map>
#include <string>

#include "elbptop/error.hpp"

namespace elbptop {

namespace {

void check_points(int points) {
  if (points < 2 || points > 16) {
    throw ConfigError("encoding tables support 2 <= p <= 16, got p=" + std::to_string(points));
  }
}

Code rotate_right(Code code, int points) {
  const Code mask = (Code{1} << points) - 1;
  return ((code >> 1) | (code << (points - 1))) & mask;
}

}  // namespace

std::string_view to_string(Encoding encoding) {
  switch (encoding) {
    case Encoding::kFull:
      return "full";
    case Encoding::kUniform:
      return "u2";
    case Encoding::kRotationInvariant:
      return "ri";
    case Encoding::kRiu2:
      return "riu2";
  }
  return "unknown";
}

Encoding parse_encoding(std::string_view name) {
  if (name == "full") return Encoding::kFull;
  if (name == "u2") return Encoding::kUniform;
  if (name == "ri") return Encoding::kRotationInvariant;
  if (name == "riu2") return Encoding::kRiu2;
  throw ConfigError("unknown encoding '" + std::string(name) + "'");
}

int bit_transitions(Code code, int points) {
  int count = 0;
  for (int n = 0; n < points; ++n) {
    const Code a = (code >> n) & 1u;
    const Code b = (code >> ((n + 1) % points)) & 1u;
    count += a != b;
  }
  return count;
}

Code rotation_minimum(Code code, int points) {
  Code best = code;
  Code rotated = code;
  for (int k = 1; k < points; ++k) {
    rotated = rotate_right(rotated, points);
    if (rotated < best) best = rotated;
  }
  return best;
}

EncodingTable EncodingTable::build(Encoding encoding, int points) {
  check_points(points);
  const std::size_t size = std::size_t{1} << points;
  std::vector<std::uint32_t> map(size);

  switch (encoding) {
    case Encoding::kFull: {
      for (std::size_t c = 0; c < size; ++c) map[c] = static_cast<std::uint32_t>(c);
      return EncodingTable(encoding, points, static_cast<int>(size), std::move(map));
    }
    case Encoding::kUniform: {
      std::uint32_t next = 0;
      for (std::size_t c = 0; c < size; ++c) {
        if (is_uniform(static_cast<Code>(c), points)) map[c] = next++;
      }
      const std::uint32_t nonuniform = next;
      for (std::size_t c = 0; c < size; ++c) {
        if (!is_uniform(static_cast<Code>(c), points)) map[c] = nonuniform;
      }
      return EncodingTable(encoding, points, static_cast<int>(nonuniform + 1), std::move(map));
    }
    case Encoding::kRotationInvariant: {
      // Bins are numbered in increasing order of the orbit representative.
      std::map<Code, std::uint32_t> orbit_bin;
      for (std::size_t c = 0; c < size; ++c) orbit_bin.emplace(rotation_minimum(static_cast<Code>(c), points), 0);
      std::uint32_t next = 0;
      for (auto& [rep, bin] : orbit_bin) bin = next++;
      for (std::size_t c = 0; c < size; ++c) map[c] = orbit_bin.at(rotation_minimum(static_cast<Code>(c), points));
      return EncodingTable(encoding, points, static_cast<int>(next), std::move(map));
    }
    case Encoding::kRiu2: {
      for (std::size_t c = 0; c < size; ++c) {
        const Code code = static_cast<Code>(c);
        map[c] = is_uniform(code, points) ? static_cast<std::uint32_t>(std::popcount(code))
                                          : static_cast<std::uint32_t>(points + 1);
      }
      return EncodingTable(encoding, points, points + 2, std::move(map));
    }
  }
  throw ConfigError("unhandled encoding");
}

int encoding_bins(Encoding encoding, int points) {
  check_points(points);
  switch (encoding) {
    case Encoding::kFull:
      return 1 << points;
    case Encoding::kUniform:
      // p(p-1) codes with exactly two transitions, plus all-zeros and all-ones.
      return points * (points - 1) + 2 + 1;
    case Encoding::kRiu2:
      return points + 2;
    case Encoding::kRotationInvariant:
      return EncodingTable::build(encoding, points).bins();
  }
  throw ConfigError("unhandled encoding");
}

}  // namespace elbptop
