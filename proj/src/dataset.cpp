#include "texbench/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

#include <opencv2/imgcodecs.hpp>

#include "texbench/errors.hpp"

namespace fs = std::filesystem;

namespace texbench {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

Layout parse_layout(std::string_view name) {
  if (name == "subdirs") return Layout::per_class_subdirs;
  if (name == "prefix") return Layout::filename_prefix;
  throw ParameterError("unknown layout '" + std::string(name) + "' (expected subdirs|prefix)");
}

std::string_view layout_name(Layout layout) {
  return layout == Layout::per_class_subdirs ? "subdirs" : "prefix";
}

std::vector<std::size_t> LabeledImageSet::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (int label : labels) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

std::vector<std::string> LabeledImageSet::label_names() const {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (int label : labels) out.push_back(class_names[static_cast<std::size_t>(label)]);
  return out;
}

std::string label_from_stem(std::string_view stem) {
  std::size_t end = 0;
  while (end < stem.size() && is_alnum(stem[end])) ++end;
  std::string_view prefix = stem.substr(0, end);
  std::size_t cut = prefix.size();
  while (cut > 0 && std::isdigit(static_cast<unsigned char>(prefix[cut - 1]))) --cut;
  if (cut > 0) prefix = prefix.substr(0, cut);
  return std::string(prefix);
}

bool is_supported_image(const fs::path& path) {
  const std::string ext = lower(path.extension().string());
  return ext == ".tif" || ext == ".tiff" || ext == ".png" || ext == ".bmp";
}

RgbImage decode_image(const fs::path& path) {
  cv::Mat bgr;
  try {
    bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw IoError("cannot decode image " + path.string() + ": " + e.what());
  }
  if (bgr.empty() || bgr.type() != CV_8UC3) {
    throw IoError("cannot decode image " + path.string());
  }
  RgbImage out;
  out.width = bgr.cols;
  out.height = bgr.rows;
  out.rgb.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  std::size_t i = 0;
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      out.rgb[i++] = row[x][2];
      out.rgb[i++] = row[x][1];
      out.rgb[i++] = row[x][0];
    }
  }
  return out;
}

GrayImage load_gray(const fs::path& path) { return to_grayscale(decode_image(path)); }

void save_gray(const fs::path& path, const GrayImage& img) {
  cv::Mat mat(img.height(), img.width(), CV_8UC1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      mat.at<std::uint8_t>(y, x) =
          static_cast<std::uint8_t>(std::clamp(std::lround(img.at(x, y)), 0L, 255L));
    }
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write image " + path.string() + ": " + e.what());
  }
  if (!ok) throw IoError("cannot write image " + path.string());
}

LabeledImageSet load_dataset(const fs::path& root, const LoadOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw IoError("dataset root is not a directory: " + root.string());
  }

  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::end(it);
       it.increment(ec)) {
    if (it->is_regular_file() && is_supported_image(it->path())) files.push_back(it->path());
  }
  if (ec) throw IoError("cannot scan " + root.string() + ": " + ec.message());
  if (files.empty()) throw IoError("no images found under " + root.string());

  std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) {
    return a.lexically_relative(root).generic_string() < b.lexically_relative(root).generic_string();
  });

  std::vector<std::string> names;
  names.reserve(files.size());
  for (const auto& file : files) {
    const fs::path rel = file.lexically_relative(root);
    std::string name;
    if (options.layout == Layout::per_class_subdirs) {
      if (std::distance(rel.begin(), rel.end()) < 2) {
        throw IoError("image outside any class directory: " + file.string());
      }
      name = rel.begin()->string();
    } else {
      name = label_from_stem(file.stem().string());
    }
    if (name.empty()) throw IoError("cannot derive a class label from " + file.string());
    names.push_back(std::move(name));
  }

  LabeledImageSet set;
  std::map<std::string, int> ids;
  for (const auto& n : names) ids.emplace(n, 0);
  for (auto& [n, id] : ids) {
    id = static_cast<int>(set.class_names.size());
    set.class_names.push_back(n);
  }

  set.images.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    GrayImage img = load_gray(files[i]);
    if (options.resize) img = resize_area(img, options.resize->first, options.resize->second);
    set.images.push_back(std::move(img));
    set.labels.push_back(ids.at(names[i]));
    set.sources.push_back(files[i].lexically_relative(root).generic_string());
  }

  // Per-class-subdirs can name a class directory that holds no images.
  if (options.layout == Layout::per_class_subdirs) {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (entry.is_directory() && !ids.contains(entry.path().filename().string())) {
        throw IoError("empty class directory: " + entry.path().string());
      }
    }
  }
  return set;
}

std::string fingerprint(const LabeledImageSet& set) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (std::size_t i = 0; i < set.size(); ++i) {
    mix(i < set.sources.size() ? set.sources[i] : std::to_string(i));
    mix(set.class_names[static_cast<std::size_t>(set.labels[i])]);
    mix(std::to_string(set.images[i].width()) + "x" + std::to_string(set.images[i].height()));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace texbench
