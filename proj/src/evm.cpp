#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "elbptop/error.hpp"
#include "elbptop/preprocess.hpp"

namespace elbptop {

namespace {

constexpr std::array<double, 5> kBinomial{1.0, 4.0, 6.0, 4.0, 1.0};

int reflect101(int j, int n) {
  if (n == 1) return 0;
  while (j < 0 || j >= n) {
    if (j < 0) j = -j;
    if (j >= n) j = 2 * n - 2 - j;
  }
  return j;
}

// 5-tap binomial blur along both axes, then keep even samples.
std::vector<double> reduce(const std::vector<double>& img, int w, int h, int& out_w, int& out_h) {
  std::vector<double> tmp(img.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 5; ++k) acc += kBinomial[k] * img[static_cast<std::size_t>(y) * w + reflect101(x + k - 2, w)];
      tmp[static_cast<std::size_t>(y) * w + x] = acc / 16.0;
    }
  }
  out_w = (w + 1) / 2;
  out_h = (h + 1) / 2;
  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 5; ++k) acc += kBinomial[k] * tmp[static_cast<std::size_t>(reflect101(2 * y + k - 2, h)) * w + 2 * x];
      out[static_cast<std::size_t>(y) * out_w + x] = acc / 16.0;
    }
  }
  return out;
}

// Zero-insertion upsampling to (w, h) followed by the binomial kernel scaled
// by 2 per axis; constant images stay constant.
std::vector<double> expand(const std::vector<double>& img, int cw, int ch, int w, int h) {
  std::vector<double> rows(static_cast<std::size_t>(w) * ch);
  for (int y = 0; y < ch; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 5; ++k) {
        const int j = reflect101(x + k - 2, w);
        if (j % 2 == 0) acc += kBinomial[k] * img[static_cast<std::size_t>(y) * cw + std::min(j / 2, cw - 1)];
      }
      rows[static_cast<std::size_t>(y) * w + x] = acc / 8.0;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 5; ++k) {
        const int j = reflect101(y + k - 2, h);
        if (j % 2 == 0) acc += kBinomial[k] * rows[static_cast<std::size_t>(std::min(j / 2, ch - 1)) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] = acc / 8.0;
    }
  }
  return out;
}

int usable_levels(int requested, int width, int height) {
  int max_levels = 1;
  int size = std::min(width, height);
  while (size >= 2) {
    size = (size + 1) / 2;
    ++max_levels;
    if (size == 1) break;
  }
  return std::clamp(requested, 1, max_levels);
}

void run_filter(const BandPass& f, std::vector<double>& x, double init) {
  // Transposed direct form II; steady state of a constant input is zero output.
  double z1 = -f.b0 * init;
  double z2 = -f.b0 * init;
  for (double& v : x) {
    const double in = v;
    const double y = f.b0 * in + z1;
    z1 = -f.a1 * y + z2;
    z2 = -f.b0 * in - f.a2 * y;
    v = y;
  }
}

}  // namespace

std::string_view to_string(FrequencyUnit unit) {
  return unit == FrequencyUnit::kHertz ? "hz" : "cycles_per_frame";
}

FrequencyUnit parse_frequency_unit(std::string_view name) {
  if (name == "hz") return FrequencyUnit::kHertz;
  if (name == "cycles_per_frame") return FrequencyUnit::kCyclesPerFrame;
  throw ConfigError("unknown frequency unit '" + std::string(name) + "' (expected hz or cycles_per_frame)");
}

double EvmParams::low_cycles() const { return unit == FrequencyUnit::kHertz ? freq_low / frame_rate : freq_low; }
double EvmParams::high_cycles() const { return unit == FrequencyUnit::kHertz ? freq_high / frame_rate : freq_high; }

void EvmParams::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("magnification factor must be non-negative");
  if (unit == FrequencyUnit::kHertz && !(frame_rate > 0.0)) {
    throw ConfigError("band edges given in Hz need a positive frame rate");
  }
  const double lo = low_cycles();
  const double hi = high_cycles();
  if (!(lo > 0.0) || !(hi > lo) || !(hi < 0.5)) {
    throw ConfigError("band edges must satisfy 0 < low < high < Nyquist, got " + std::to_string(lo) + ", " +
                      std::to_string(hi) + " cycles/frame");
  }
  if (!(lambda_c > 0.0)) throw ConfigError("spatial wavelength cutoff must be positive");
  if (levels < 1) throw ConfigError("pyramid needs at least one level");
}

BandPass BandPass::butterworth(double low_cycles, double high_cycles) {
  const double wl = std::tan(std::numbers::pi * low_cycles);
  const double wh = std::tan(std::numbers::pi * high_cycles);
  const double bw = wh - wl;
  const double w0sq = wl * wh;
  const double a0 = 1.0 + bw + w0sq;
  BandPass f;
  f.b0 = bw / a0;
  f.a1 = 2.0 * (w0sq - 1.0) / a0;
  f.a2 = (1.0 - bw + w0sq) / a0;
  return f;
}

double BandPass::magnitude(double cycles) const {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * cycles);
  const std::complex<double> z2 = z1 * z1;
  return std::abs(b0 * (1.0 - z2) / (1.0 + a1 * z1 + a2 * z2));
}

void filtfilt(const BandPass& filter, std::span<double> series) {
  const int n = static_cast<int>(series.size());
  if (n < 2) {
    std::fill(series.begin(), series.end(), 0.0);
    return;
  }
  const int pad = std::min(9, n - 1);
  std::vector<double> ext;
  ext.reserve(static_cast<std::size_t>(n + 2 * pad));
  for (int i = pad; i >= 1; --i) ext.push_back(2.0 * series[0] - series[static_cast<std::size_t>(i)]);
  ext.insert(ext.end(), series.begin(), series.end());
  for (int i = n - 2; i >= n - 1 - pad; --i) ext.push_back(2.0 * series[static_cast<std::size_t>(n - 1)] - series[static_cast<std::size_t>(i)]);

  run_filter(filter, ext, ext.front());
  std::reverse(ext.begin(), ext.end());
  run_filter(filter, ext, ext.front());
  std::reverse(ext.begin(), ext.end());
  std::copy(ext.begin() + pad, ext.begin() + pad + n, series.begin());
}

Pyramid build_laplacian_pyramid(std::span<const double> image, int width, int height, int levels) {
  Pyramid pyr;
  std::vector<double> current(image.begin(), image.end());
  int w = width;
  int h = height;
  for (int l = 0; l < levels - 1; ++l) {
    int cw = 0, ch = 0;
    std::vector<double> coarse = reduce(current, w, h, cw, ch);
    std::vector<double> up = expand(coarse, cw, ch, w, h);
    for (std::size_t i = 0; i < current.size(); ++i) current[i] -= up[i];
    pyr.bands.push_back(std::move(current));
    pyr.widths.push_back(w);
    pyr.heights.push_back(h);
    current = std::move(coarse);
    w = cw;
    h = ch;
  }
  pyr.bands.push_back(std::move(current));
  pyr.widths.push_back(w);
  pyr.heights.push_back(h);
  return pyr;
}

std::vector<double> collapse_pyramid(const Pyramid& pyramid) {
  const std::size_t levels = pyramid.bands.size();
  std::vector<double> img = pyramid.bands.back();
  for (std::size_t l = levels - 1; l-- > 0;) {
    std::vector<double> up =
        expand(img, pyramid.widths[l + 1], pyramid.heights[l + 1], pyramid.widths[l], pyramid.heights[l]);
    for (std::size_t i = 0; i < up.size(); ++i) up[i] += pyramid.bands[l][i];
    img = std::move(up);
  }
  return img;
}

std::vector<double> level_alphas(const EvmParams& params, int width, int height, int levels) {
  std::vector<double> alphas(static_cast<std::size_t>(levels));
  // Coarsest level represents a third of the frame diagonal; each finer level halves it.
  double wavelength = std::sqrt(static_cast<double>(width) * width + static_cast<double>(height) * height) / 3.0;
  for (int l = levels - 1; l >= 0; --l) {
    double a = params.alpha;
    if (wavelength < params.lambda_c) a = wavelength * (1.0 + params.alpha) / params.lambda_c - 1.0;
    alphas[static_cast<std::size_t>(l)] = std::clamp(a, 0.0, params.alpha);
    wavelength /= 2.0;
  }
  return alphas;
}

VideoVolume magnify(const VideoVolume& volume, const EvmParams& params) {
  params.validate();
  if (volume.length() < 4) {
    throw PreprocessError("clip '" + volume.clip_id + "' has " + std::to_string(volume.length()) +
                          " frames; magnification needs at least 4");
  }
  const int w = volume.width();
  const int h = volume.height();
  const int len = volume.length();
  VideoVolume out = volume;
  if (params.alpha == 0.0) return out;

  const int levels = usable_levels(params.levels, w, h);
  const std::vector<double> alphas = level_alphas(params, w, h, levels);
  const BandPass filter = BandPass::butterworth(params.low_cycles(), params.high_cycles());

  std::vector<Pyramid> pyramids;
  pyramids.reserve(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) {
    pyramids.push_back(build_laplacian_pyramid({volume.frame(t), volume.frame_size()}, w, h, levels));
  }

  std::vector<double> series(static_cast<std::size_t>(len));
  for (int l = 0; l < levels; ++l) {
    const double alpha = alphas[static_cast<std::size_t>(l)];
    const std::size_t count = pyramids.front().bands[static_cast<std::size_t>(l)].size();
    for (std::size_t i = 0; i < count; ++i) {
      if (alpha == 0.0) {
        for (auto& p : pyramids) p.bands[static_cast<std::size_t>(l)][i] = 0.0;
        continue;
      }
      for (int t = 0; t < len; ++t) series[static_cast<std::size_t>(t)] = pyramids[static_cast<std::size_t>(t)].bands[static_cast<std::size_t>(l)][i];
      filtfilt(filter, series);
      for (int t = 0; t < len; ++t) {
        pyramids[static_cast<std::size_t>(t)].bands[static_cast<std::size_t>(l)][i] = alpha * series[static_cast<std::size_t>(t)];
      }
    }
  }

  for (int t = 0; t < len; ++t) {
    const std::vector<double> delta = collapse_pyramid(pyramids[static_cast<std::size_t>(t)]);
    double* frame = out.frame(t);
    for (std::size_t i = 0; i < delta.size(); ++i) frame[i] += delta[i];
  }
  return out;
}

}  // namespace elbptop
