#include <doctest.h>

#include <numeric>
#include <random>

#include "elbptop/descriptor.hpp"
#include "elbptop/error.hpp"
#include "oracle.hpp"

using namespace elbptop;

namespace {

DescriptorConfig make(CodeKind kind, double r, int p, double delta, Encoding enc, const char* planes, BlockGrid grid) {
  DescriptorConfig c;
  c.kind = kind;
  c.neighbors = {r, p, delta};
  c.encoding = enc;
  c.planes = PlaneSet::parse(planes);
  c.grid = grid;
  return c;
}

}  // namespace

TEST_CASE("dimension of full-pattern descriptors") {
  CHECK(make(CodeKind::kLbp, 1, 8, 0, Encoding::kFull, "TOP", {8, 8, 2}).dimension() == 98304);
  CHECK(make(CodeKind::kLbp, 1, 8, 0, Encoding::kFull, "XY", {8, 8, 2}).dimension() == 32768);
  CHECK(make(CodeKind::kAdlbp, 1, 8, 0, Encoding::kUniform, "XYOT", {5, 5, 2}).dimension() == 5 * 5 * 2 * 2 * 59);
}

TEST_CASE("histograms equal the brute-force evaluation") {
  std::mt19937_64 rng(21);
  const std::vector<DescriptorConfig> configs = {
      make(CodeKind::kLbp, 1, 8, 0, Encoding::kFull, "TOP", {2, 2, 2}),
      make(CodeKind::kLbp, 2, 4, 0, Encoding::kUniform, "XOT", {3, 1, 2}),
      make(CodeKind::kAdlbp, 1.5, 8, 0, Encoding::kRiu2, "XYOT", {2, 3, 1}),
      make(CodeKind::kAdlbp, 1, 6, 0, Encoding::kRotationInvariant, "XY", {1, 2, 3}),
      make(CodeKind::kRdlbp, 2, 8, 1, Encoding::kFull, "TOP", {2, 2, 1}),
      make(CodeKind::kRdlbp, 3, 4, 2, Encoding::kUniform, "YOT", {2, 1, 2}),
  };
  for (const auto& cfg : configs) {
    for (int trial = 0; trial < 3; ++trial) {
      const VideoVolume vol = oracle::random_volume(rng, 11, 10, 9, trial != 1);
      const auto got = extract_descriptor(vol, cfg).values;
      const auto want = oracle::histogram(vol, cfg);
      REQUIRE(got.size() == want.size());
      CHECK_MESSAGE(got == want, cfg.layout());
    }
  }
}

TEST_CASE("every non-empty segment sums to one") {
  std::mt19937_64 rng(2);
  const VideoVolume vol = oracle::random_volume(rng, 20, 18, 9);
  const auto cfg = make(CodeKind::kLbp, 1, 8, 0, Encoding::kFull, "TOP", {4, 3, 2});
  const DescriptorHistogram h = extract_descriptor(vol, cfg);
  for (std::size_t slot = 0; slot < 3; ++slot) {
    for (int b = 0; b < cfg.grid.count(); ++b) {
      const auto off = h.segment_offset(slot, b);
      const double sum = std::accumulate(h.values.begin() + static_cast<std::ptrdiff_t>(off),
                                         h.values.begin() + static_cast<std::ptrdiff_t>(off + 256), 0.0);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("blocks without valid centers stay zero") {
  std::mt19937_64 rng(4);
  // 6 valid positions along x split into 8 blocks: the first two are empty.
  const VideoVolume vol = oracle::random_volume(rng, 8, 8, 8);
  const auto cfg = make(CodeKind::kLbp, 1, 4, 0, Encoding::kFull, "XY", {8, 1, 1});
  const DescriptorHistogram h = extract_descriptor(vol, cfg);
  for (int b = 0; b < 8; ++b) {
    const auto off = h.segment_offset(0, b);
    const double sum = std::accumulate(h.values.begin() + static_cast<std::ptrdiff_t>(off),
                                       h.values.begin() + static_cast<std::ptrdiff_t>(off + 16), 0.0);
    CHECK(sum == doctest::Approx(b < 2 ? 0.0 : 1.0));
  }
}

TEST_CASE("gray shift and positive scaling leave histograms unchanged") {
  std::mt19937_64 rng(8);
  for (CodeKind kind : {CodeKind::kLbp, CodeKind::kAdlbp, CodeKind::kRdlbp}) {
    const auto cfg = make(kind, 2, 8, kind == CodeKind::kRdlbp ? 1 : 0, Encoding::kFull, "TOP", {2, 2, 2});
    VideoVolume vol = oracle::random_volume(rng, 14, 12, 8);
    const auto base = extract_descriptor(vol, cfg).values;
    VideoVolume moved = vol;
    for (double& v : moved.data()) v = 1.7 * v + 40.0;
    const auto other = extract_descriptor(moved, cfg).values;
    for (std::size_t i = 0; i < base.size(); ++i) REQUIRE(other[i] == doctest::Approx(base[i]).epsilon(1e-9));
  }
}

TEST_CASE("uniform histogram merges the nonuniform bins of the full histogram") {
  std::mt19937_64 rng(9);
  const VideoVolume vol = oracle::random_volume(rng, 12, 12, 8);
  auto full_cfg = make(CodeKind::kAdlbp, 1, 8, 0, Encoding::kFull, "TOP", {2, 2, 2});
  auto u2_cfg = full_cfg;
  u2_cfg.encoding = Encoding::kUniform;
  const auto full = extract_descriptor(vol, full_cfg);
  const auto u2 = extract_descriptor(vol, u2_cfg);
  const EncodingTable table = EncodingTable::build(Encoding::kUniform, 8);
  for (std::size_t slot = 0; slot < 3; ++slot) {
    for (int b = 0; b < 8; ++b) {
      std::vector<double> merged(59, 0.0);
      for (Code c = 0; c < 256; ++c) merged[table[c]] += full.values[full.segment_offset(slot, b) + c];
      for (int k = 0; k < 59; ++k) CHECK(u2.values[u2.segment_offset(slot, b) + k] == doctest::Approx(merged[k]));
    }
  }
}

TEST_CASE("too-small volumes raise a border error naming the axis") {
  const VideoVolume vol(10, 10, 2);
  const auto cfg = make(CodeKind::kLbp, 1, 8, 0, Encoding::kFull, "TOP", {1, 1, 1});
  try {
    extract_descriptor(vol, cfg);
    FAIL("expected a border error");
  } catch (const BorderError& e) {
    CHECK(std::string(e.what()).find("axis t") != std::string::npos);
  }
  // XY alone never samples along t.
  CHECK_NOTHROW(extract_descriptor(vol, make(CodeKind::kLbp, 1, 8, 0, Encoding::kFull, "XY", {1, 1, 1})));
}

TEST_CASE("descriptor validation") {
  CHECK_THROWS_AS(make(CodeKind::kLbp, 2, 8, 1, Encoding::kFull, "TOP", {1, 1, 1}).validate(), ConfigError);
  CHECK_THROWS_AS(make(CodeKind::kLbp, 1, 8, 0, Encoding::kFull, "TOP", {0, 1, 1}).validate(), ConfigError);
  CHECK_THROWS_AS(PlaneSet::parse("XZ"), ConfigError);
  CHECK(make(CodeKind::kRdlbp, 2, 8, 1, Encoding::kFull, "XOT", {8, 8, 2}).layout() ==
        "rdlbp;r=2;p=8;d=1;enc=full;planes=XOT;blocks=8x8x2;bins=256");
}

TEST_CASE("plane sets and slices") {
  CHECK(PlaneSet::parse("XYOT") == PlaneSet(false, true, true));
  CHECK(PlaneSet::parse("XY,YT").name() == "XY,YT");
  const VideoVolume vol(4, 3, 5);
  const auto slices = slice_planes(vol, PlaneSet::top());
  CHECK(slices.size() == 5 + 3 + 4);
  CHECK(slices[5].view.width() == 4);
  CHECK(slices[5].view.height() == 5);
  CHECK(partition_axis(7, 3) == std::vector<int>{0, 0, 1, 1, 2, 2, 2});
}

TEST_CASE("fusion concatenates in order") {
  const std::vector<std::vector<double>> parts = {{1, 2}, {3}, {4, 5}};
  CHECK(fuse_concat(parts) == std::vector<double>{1, 2, 3, 4, 5});
  CHECK_THROWS_AS(fuse_concat(std::span<const std::vector<double>>()), ConfigError);
}
