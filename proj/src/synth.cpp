#include "elbptop/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "elbptop/error.hpp"

namespace elbptop {

namespace {

constexpr double kPi = std::numbers::pi;

struct Wave {
  double kx, ky, phase, amplitude;
};

struct Subject {
  std::vector<Wave> waves;
  double face_gain;
  double cx, cy;  // face centre jitter
};

struct Rect {
  double x0, x1, y0, y1;  // fractions of the frame
};

constexpr Rect kRegions[3] = {
    {0.28, 0.72, 0.60, 0.86},  // mouth
    {0.12, 0.46, 0.18, 0.40},  // left brow
    {0.54, 0.88, 0.18, 0.40},  // right brow
};

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

Subject make_subject(const SynthSpec& spec, int s) {
  auto rng = make_rng(spec.seed, 1, static_cast<std::uint64_t>(s));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Subject subject;
  for (int k = 0; k < 24; ++k) {
    const double angle = 2.0 * kPi * unit(rng);
    const double wavelength = 3.0 + 9.0 * unit(rng);
    const double freq = 2.0 * kPi / wavelength;
    subject.waves.push_back({freq * std::cos(angle), freq * std::sin(angle), 2.0 * kPi * unit(rng), 3.0 + 5.0 * unit(rng)});
  }
  subject.face_gain = 25.0 + 20.0 * unit(rng);
  subject.cx = 0.5 + 0.04 * (unit(rng) - 0.5);
  subject.cy = 0.5 + 0.04 * (unit(rng) - 0.5);
  return subject;
}

// Static appearance at a continuous position.
double appearance(const SynthSpec& spec, const Subject& subject, double x, double y) {
  const double ex = (x / spec.width - subject.cx) / 0.38;
  const double ey = (y / spec.height - subject.cy) / 0.46;
  const double r = std::sqrt(ex * ex + ey * ey);
  const double face = 1.0 / (1.0 + std::exp((r - 1.0) * 12.0));
  double value = 90.0 + subject.face_gain * face;
  for (const Wave& w : subject.waves) value += w.amplitude * std::sin(w.kx * x + w.ky * y + w.phase);
  return value;
}

// Raised-cosine window over the region, zero on and outside its border.
double region_weight(const SynthSpec& spec, const Rect& rect, int x, int y) {
  const double fx = ((x + 0.5) / spec.width - rect.x0) / (rect.x1 - rect.x0);
  const double fy = ((y + 0.5) / spec.height - rect.y0) / (rect.y1 - rect.y0);
  if (fx <= 0.0 || fx >= 1.0 || fy <= 0.0 || fy >= 1.0) return 0.0;
  return std::sin(kPi * fx) * std::sin(kPi * fy);
}

}  // namespace

void SynthSpec::validate() const {
  if (classes < 1 || subjects < 1 || clips_per_subject < 1 || width < 1 || height < 1 || length < 1) {
    throw ConfigError("synthetic data counts and sizes must be at least 1");
  }
  if (classes > 9) throw ConfigError("synthetic data supports at most 9 classes");
  if (!(frame_rate > 0.0)) throw ConfigError("frame rate must be positive");
  if (drift_pixels < 0.0 || pulse_levels < 0.0 || noise_levels < 0.0) {
    throw ConfigError("synthetic amplitudes must be non-negative");
  }
}

int synth_label(const SynthSpec& spec, int subject, int clip) { return (clip + subject) % spec.classes; }

std::vector<bool> synth_region_mask(const SynthSpec& spec, int label) {
  const Rect& rect = kRegions[label / 3];
  std::vector<bool> mask(static_cast<std::size_t>(spec.width) * spec.height);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      mask[static_cast<std::size_t>(y) * spec.width + x] = region_weight(spec, rect, x, y) > 0.0;
    }
  }
  return mask;
}

VideoVolume synth_clip(const SynthSpec& spec, int s, int c, int label) {
  spec.validate();
  const Subject subject = make_subject(spec, s);
  auto rng = make_rng(spec.seed, 2, (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint32_t>(c));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  // Timing and strength jitter, drawn before the noise and for every class alike.
  const double duration = std::max(3.0, spec.length * (0.45 + 0.15 * unit(rng)));
  const double onset = std::max(0.0, (spec.length - 1 - duration) * unit(rng));
  const double gain = 0.8 + 0.4 * unit(rng);
  std::vector<double> bump(static_cast<std::size_t>(spec.length), 0.0);
  for (int t = 0; t < spec.length; ++t) {
    const double u = (t - onset) / duration;
    if (u > 0.0 && u < 1.0) bump[static_cast<std::size_t>(t)] = gain * 0.5 * (1.0 - std::cos(2.0 * kPi * u));
  }

  const Rect& rect = kRegions[label / 3];
  const int pattern = label % 3;
  VideoVolume volume(spec.width, spec.height, spec.length);
  for (int t = 0; t < spec.length; ++t) {
    const double b = bump[static_cast<std::size_t>(t)];
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        double value = appearance(spec, subject, x, y);
        const double w = region_weight(spec, rect, x, y);
        if (w > 0.0 && b > 0.0) {
          if (pattern == 0) {
            value = (1.0 - w) * value + w * appearance(spec, subject, x - spec.drift_pixels * b, y);
          } else if (pattern == 1) {
            value = (1.0 - w) * value + w * appearance(spec, subject, x, y - spec.drift_pixels * b);
          } else {
            value += w * spec.pulse_levels * b;
          }
        }
        value += spec.noise_levels * noise(rng);
        volume.at(x, y, t) = std::clamp(std::round(value), 0.0, 255.0);
      }
    }
  }
  char id[64];
  std::snprintf(id, sizeof id, "s%02d_c%02d", s, c);
  volume.clip_id = id;
  std::snprintf(id, sizeof id, "s%02d", s);
  volume.subject_id = id;
  volume.label = "class" + std::to_string(label);
  volume.dataset_id = "synth";
  return volume;
}

std::vector<VideoVolume> synth_volumes(const SynthSpec& spec) {
  spec.validate();
  std::vector<VideoVolume> out;
  for (int s = 0; s < spec.subjects; ++s) {
    for (int c = 0; c < spec.clips_per_subject; ++c) out.push_back(synth_clip(spec, s, c, synth_label(spec, s, c)));
  }
  return out;
}

DatasetManifest synth_generate(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  DatasetManifest manifest;
  manifest.root = out_dir;
  manifest.frame_rate = spec.frame_rate;
  for (int k = 0; k < spec.classes; ++k) manifest.class_names.push_back("class" + std::to_string(k));
  for (const VideoVolume& v : synth_volumes(spec)) {
    for (int t = 0; t < v.length(); ++t) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%03d.png", t);
      write_gray_frame(out_dir / v.clip_id / name, v.frame(t), v.width(), v.height());
    }
    manifest.entries.push_back({v.clip_id, v.clip_id, v.subject_id, v.label, v.dataset_id});
  }
  save_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace elbptop
