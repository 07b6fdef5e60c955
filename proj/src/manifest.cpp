#include "elbptop/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <set>

#include "elbptop/error.hpp"
#include "elbptop/parallel.hpp"

namespace elbptop {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path DatasetManifest::resolve(const ManifestEntry& entry) const {
  return entry.clip_path.is_absolute() ? entry.clip_path : root / entry.clip_path;
}

int DatasetManifest::class_index(const std::string& label) const {
  auto it = std::find(class_names.begin(), class_names.end(), label);
  return it == class_names.end() ? -1 : static_cast<int>(it - class_names.begin());
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open manifest " + path.string());
  json v;
  try {
    v = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IngestError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }

  DatasetManifest m;
  m.root = path.parent_path();
  try {
    m.class_names = v.at("class_names").get<std::vector<std::string>>();
    m.frame_rate = v.value("frame_rate", 0.0);
    std::set<std::string> ids;
    for (const json& e : v.at("entries")) {
      ManifestEntry entry;
      entry.clip_path = e.at("clip_path").get<std::string>();
      entry.clip_id = e.value("clip_id", entry.clip_path.filename().string());
      entry.subject_id = e.at("subject_id").get<std::string>();
      entry.label = e.at("label").get<std::string>();
      entry.dataset_id = e.value("dataset_id", std::string("default"));
      if (entry.subject_id.empty()) throw ConfigError("clip " + entry.clip_id + " has an empty subject id");
      if (m.class_index(entry.label) < 0) {
        throw ConfigError("clip " + entry.clip_id + " has label '" + entry.label + "' outside class_names");
      }
      if (!ids.insert(entry.clip_id).second) throw ConfigError("duplicate clip id " + entry.clip_id);
      if (!fs::is_directory(m.resolve(entry))) {
        throw IngestError("clip " + entry.clip_id + ": frame directory " + m.resolve(entry).string() + " does not exist");
      }
      m.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw IngestError("manifest " + path.string() + ": " + e.what());
  }
  return m;
}

void save_manifest(const DatasetManifest& m, const fs::path& path) {
  json entries = json::array();
  for (const ManifestEntry& e : m.entries) {
    entries.push_back({{"clip_id", e.clip_id},
                       {"clip_path", e.clip_path.generic_string()},
                       {"subject_id", e.subject_id},
                       {"label", e.label},
                       {"dataset_id", e.dataset_id}});
  }
  const json v = {{"class_names", m.class_names}, {"frame_rate", m.frame_rate}, {"entries", entries}};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IngestError("cannot write manifest " + path.string());
  out << v.dump(2) << "\n";
}

namespace {

bool is_image(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

// Trailing decimal number of the file stem, -1 when there is none.
long long trailing_number(const fs::path& p) {
  const std::string stem = p.stem().string();
  std::size_t start = stem.size();
  while (start > 0 && std::isdigit(static_cast<unsigned char>(stem[start - 1]))) --start;
  if (start == stem.size() || stem.size() - start > 15) return -1;
  return std::stoll(stem.substr(start));
}

}  // namespace

std::vector<fs::path> list_frames(const fs::path& clip_dir) {
  if (!fs::is_directory(clip_dir)) throw IngestError("frame directory " + clip_dir.string() + " does not exist");
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(clip_dir)) {
    if (entry.is_regular_file() && is_image(entry.path())) frames.push_back(entry.path());
  }
  std::sort(frames.begin(), frames.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (frames.empty()) throw IngestError("no frame images in " + clip_dir.string());

  long long previous = trailing_number(frames.front());
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const long long index = trailing_number(frames[i]);
    if (previous < 0 || index < 0) {
      if ((previous < 0) != (index < 0)) throw IngestError("mixed numbered and unnumbered frames in " + clip_dir.string());
    } else if (index <= previous) {
      throw IngestError("frame indices are not increasing in " + clip_dir.string() + " at " + frames[i].filename().string());
    } else if (index != previous + 1) {
      throw IngestError("missing frame " + std::to_string(previous + 1) + " in " + clip_dir.string());
    }
    previous = index;
  }
  return frames;
}

Frame read_frame(const fs::path& path) {
  const cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) throw IngestError("cannot decode " + path.string());
  if (img.depth() != CV_8U) throw IngestError(path.string() + " is not an 8-bit image");
  const int channels = img.channels();
  if (channels != 1 && channels != 3 && channels != 4) {
    throw IngestError(path.string() + " has " + std::to_string(channels) + " channels");
  }
  Frame f;
  f.width = img.cols;
  f.height = img.rows;
  f.channels = channels == 1 ? 1 : 3;
  f.pixels.reserve(static_cast<std::size_t>(f.width) * f.height * f.channels);
  for (int y = 0; y < img.rows; ++y) {
    const std::uint8_t* row = img.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.cols; ++x) {
      const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * channels;
      if (channels == 1) {
        f.pixels.push_back(px[0]);
      } else {
        f.pixels.push_back(px[2]);
        f.pixels.push_back(px[1]);
        f.pixels.push_back(px[0]);
      }
    }
  }
  return f;
}

void write_gray_frame(const fs::path& path, const double* pixels, int width, int height) {
  cv::Mat img(height, width, CV_8UC1);
  for (int y = 0; y < height; ++y) {
    auto* row = img.ptr<std::uint8_t>(y);
    for (int x = 0; x < width; ++x) {
      const double v = std::round(pixels[static_cast<std::size_t>(y) * width + x]);
      row[x] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), img)) throw IngestError("cannot write " + path.string());
}

std::vector<VideoVolume> ingest(const DatasetManifest& manifest, int width, int height, int threads) {
  std::vector<const ManifestEntry*> order;
  for (const auto& e : manifest.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const ManifestEntry* a, const ManifestEntry* b) { return a->clip_id < b->clip_id; });

  std::vector<VideoVolume> volumes(order.size());
  parallel_for(order.size(), threads, [&](std::size_t i) {
    const ManifestEntry& e = *order[i];
    std::vector<Frame> frames;
    try {
      for (const fs::path& p : list_frames(manifest.resolve(e))) frames.push_back(read_frame(p));
      volumes[i] = to_gray_resize(frames, width, height);
    } catch (const IngestError& err) {
      throw IngestError("clip " + e.clip_id + ": " + err.what());
    }
    volumes[i].clip_id = e.clip_id;
    volumes[i].subject_id = e.subject_id;
    volumes[i].label = e.label;
    volumes[i].dataset_id = e.dataset_id;
  });
  return volumes;
}

}  // namespace elbptop
