#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "texbench/matrix.hpp"

namespace texbench {

struct FeatureMeta {
  std::string extractor;    // "lbp", "hog", "vgg19_block4_pool", ...
  std::string params;       // free-form "key=value;key=value"
  std::string fingerprint;  // dataset digest, empty when unknown

  friend bool operator==(const FeatureMeta&, const FeatureMeta&) = default;
};

// n samples x d features with one class name per row.
struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> labels;
  FeatureMeta meta;

  std::size_t size() const noexcept { return values.rows(); }
  std::size_t dim() const noexcept { return values.cols(); }

  // Throws ParameterError when the matrix cannot be written.
  void validate() const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

// File layout (UTF-8, LF):
//   # extractor=<name>
//   # params=<params>[;dataset=<fingerprint>]
//   # dim=<d>
//   label,f0,...,f<d-1>
//   <label>,<v0>,...,<v(d-1)>     one line per sample
// Values are the shortest decimal that round-trips the 64-bit double.
std::string format_features(const FeatureMatrix& matrix);
void write_features(const std::filesystem::path& path, const FeatureMatrix& matrix);

FeatureMatrix parse_features(std::string_view text, const std::string& source = "<memory>");
FeatureMatrix read_features(const std::filesystem::path& path);

// Maps class names to dense ids in sorted-name order.
struct EncodedLabels {
  std::vector<int> ids;
  std::vector<std::string> names;
};
EncodedLabels encode_labels(std::span<const std::string> labels);

}  // namespace texbench
