#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "elbptop/manifest.hpp"
#include "elbptop/volume.hpp"

namespace elbptop {

// Face-like textured clips whose class is a subtle local motion: class k uses
// pattern k % 3 (0: horizontal drift, 1: vertical drift, 2: brightness pulse)
// inside motion region k / 3. Everything outside the region depends only on
// the subject and the clip, never on the class.
struct SynthSpec {
  int classes = 3;
  int subjects = 8;
  int clips_per_subject = 4;
  int width = 64;
  int height = 64;
  int length = 12;
  std::uint64_t seed = 0;
  double drift_pixels = 0.6;  // peak displacement of the drift patterns
  double pulse_levels = 4.0;  // peak brightness change of the pulse pattern
  double noise_levels = 1.0;  // per-pixel Gaussian noise, 8-bit scale
  double frame_rate = 100.0;

  void validate() const;
};

// Label of clip c of subject s: (c + s) % classes.
int synth_label(const SynthSpec& spec, int subject, int clip);

// Rendered clips, already quantized to 8-bit levels, sorted by clip id.
std::vector<VideoVolume> synth_volumes(const SynthSpec& spec);
VideoVolume synth_clip(const SynthSpec& spec, int subject, int clip, int label);

// Pixel mask (width x height) of the motion region used by class `label`.
std::vector<bool> synth_region_mask(const SynthSpec& spec, int label);

// Writes <out>/<clip id>/frame_000.png ... and <out>/manifest.json.
DatasetManifest synth_generate(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace elbptop
