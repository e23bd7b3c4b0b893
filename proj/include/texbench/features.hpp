#pragma once

#include <string>
#include <string_view>

#include "texbench/dataset.hpp"
#include "texbench/featstore.hpp"
#include "texbench/hog.hpp"
#include "texbench/lbp.hpp"

namespace texbench {

enum class ExtractorKind { lbp, hog };

struct ExtractorSpec {
  ExtractorKind kind = ExtractorKind::lbp;
  LbpParams lbp;
  bool lbp_normalize = false;
  HogParams hog;

  std::string name() const;
  std::string describe() const;
};

ExtractorKind parse_extractor(std::string_view name);

std::vector<double> extract_one(const GrayImage& img, const ExtractorSpec& spec);

// One row per image in dataset order, labels as class names.
FeatureMatrix extract_features(const LabeledImageSet& set, const ExtractorSpec& spec);

}  // namespace texbench
