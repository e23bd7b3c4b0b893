#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "texbench/image.hpp"

namespace texbench {

enum class Layout {
  per_class_subdirs,  // root/<class>/<image>
  filename_prefix,    // root/<class><id>.<ext>, e.g. A17.tif
};

Layout parse_layout(std::string_view name);  // "subdirs" | "prefix"
std::string_view layout_name(Layout layout);

struct LabeledImageSet {
  std::vector<GrayImage> images;
  std::vector<int> labels;                // 0-based index into class_names
  std::vector<std::string> class_names;   // sorted
  std::vector<std::string> sources;       // path relative to the root, generic form

  std::size_t size() const noexcept { return images.size(); }
  std::vector<std::size_t> class_counts() const;
  std::vector<std::string> label_names() const;
};

struct LoadOptions {
  Layout layout = Layout::filename_prefix;
  std::optional<std::pair<int, int>> resize;  // width, height
};

// Decodes every TIF/PNG/BMP under root in lexicographic path order.
// Files with other extensions are ignored.
LabeledImageSet load_dataset(const std::filesystem::path& root, const LoadOptions& options = {});

// Class label encoded in a filename stem: the text before the first
// non-alphanumeric character, with trailing digits (the sample id) removed.
// "A17" -> "A", "stroma_003" -> "stroma", "12" -> "12".
std::string label_from_stem(std::string_view stem);

bool is_supported_image(const std::filesystem::path& path);

RgbImage decode_image(const std::filesystem::path& path);
GrayImage load_gray(const std::filesystem::path& path);
// 8-bit single-channel write; values are rounded and clamped. Format from extension.
void save_gray(const std::filesystem::path& path, const GrayImage& img);

// Stable 64-bit hex digest of the corpus identity (relative paths, labels, sizes).
std::string fingerprint(const LabeledImageSet& set);

}  // namespace texbench
