#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "elbptop/volume.hpp"

namespace elbptop {

// Interleaved 8-bit-scale image, 1 (gray) or 3 (R, G, B) channels.
struct Frame {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> pixels;
};

// Bilinear resize with pixel-center alignment and edge clamping.
std::vector<double> resize_bilinear(std::span<const double> src, int width, int height, int new_width,
                                    int new_height);

// BT.601 luminance (0.299 R + 0.587 G + 0.114 B) followed by bilinear resize.
// Throws IngestError for an empty sequence or mixed frame sizes.
VideoVolume to_gray_resize(std::span<const Frame> frames, int width, int height);

enum class FrequencyUnit { kCyclesPerFrame, kHertz };

std::string_view to_string(FrequencyUnit unit);
FrequencyUnit parse_frequency_unit(std::string_view name);

struct EvmParams {
  double alpha = 20.0;
  double freq_low = 0.05;
  double freq_high = 0.4;
  FrequencyUnit unit = FrequencyUnit::kCyclesPerFrame;
  double frame_rate = 0.0;  // required when unit is Hz
  double lambda_c = 16.0;
  int levels = 4;

  // Band edges in cycles per frame.
  double low_cycles() const;
  double high_cycles() const;
  void validate() const;
};

// Second-order Butterworth band-pass (first-order low-pass prototype),
// bilinear transform with pre-warped edges. Unit gain at the centre.
struct BandPass {
  double b0 = 0.0;  // numerator is b0 (1 - z^-2)
  double a1 = 0.0;
  double a2 = 0.0;

  static BandPass butterworth(double low_cycles, double high_cycles);
  // |H(e^{j 2 pi f})| for f in cycles per frame.
  double magnitude(double cycles) const;
};

// Zero-phase forward-backward filtering with odd-extension padding and
// steady-state initial conditions; a constant series maps to zeros.
void filtfilt(const BandPass& filter, std::span<double> series);

// Laplacian pyramid of one frame, finest band first, coarse residual last.
struct Pyramid {
  std::vector<std::vector<double>> bands;
  std::vector<int> widths;
  std::vector<int> heights;
};
Pyramid build_laplacian_pyramid(std::span<const double> image, int width, int height, int levels);
std::vector<double> collapse_pyramid(const Pyramid& pyramid);

// Amplification applied to each pyramid level: alpha for levels whose
// representative wavelength reaches lambda_c, ramped down linearly below it.
std::vector<double> level_alphas(const EvmParams& params, int width, int height, int levels);

// Eulerian magnification. Throws PreprocessError for clips shorter than 4
// frames and ConfigError for band edges outside (0, Nyquist).
VideoVolume magnify(const VideoVolume& volume, const EvmParams& params);

struct TimParams {
  int target_length = 10;
};

// Temporal interpolation through the path-graph embedding of the frames.
// Throws PreprocessError for single-frame clips.
VideoVolume tim_interpolate(const VideoVolume& volume, const TimParams& params);

// Value of path-graph Laplacian eigenvector k (k >= 1) at continuous
// position s in [0, n - 1].
double path_graph_basis(int k, int n, double position);

}  // namespace elbptop
