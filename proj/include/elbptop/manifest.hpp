#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "elbptop/preprocess.hpp"
#include "elbptop/volume.hpp"

namespace elbptop {

struct ManifestEntry {
  std::string clip_id;
  std::filesystem::path clip_path;  // directory of frame images, relative to the manifest
  std::string subject_id;
  std::string label;
  std::string dataset_id;
  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<std::string> class_names;
  double frame_rate = 0.0;
  std::vector<ManifestEntry> entries;
  std::filesystem::path root;  // directory relative paths resolve against

  std::filesystem::path resolve(const ManifestEntry& entry) const;
  int class_index(const std::string& label) const;  // -1 when unknown
};

// Throws IngestError for unreadable files or missing clip directories and
// ConfigError for labels outside class_names or duplicate clip ids. A missing
// clip_id defaults to the clip directory name.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// Image files of a clip in temporal order. Names sort lexicographically and,
// when they carry a trailing frame number, the numbers must rise by one.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& clip_dir);

// 8-bit gray, BGR or BGRA image as a gray or RGB frame.
Frame read_frame(const std::filesystem::path& path);
// Writes an 8-bit grayscale image; values are rounded and clamped.
void write_gray_frame(const std::filesystem::path& path, const double* pixels, int width, int height);

// Decodes, converts and resizes every clip; volumes come back sorted by clip id.
std::vector<VideoVolume> ingest(const DatasetManifest& manifest, int width, int height, int threads = 1);

}  // namespace elbptop
