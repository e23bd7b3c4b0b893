#include "texbench/features.hpp"

#include "texbench/errors.hpp"

namespace texbench {

ExtractorKind parse_extractor(std::string_view name) {
  if (name == "lbp") return ExtractorKind::lbp;
  if (name == "hog") return ExtractorKind::hog;
  throw ParameterError("unknown extractor '" + std::string(name) + "' (expected lbp|hog)");
}

std::string ExtractorSpec::name() const { return kind == ExtractorKind::lbp ? "lbp" : "hog"; }

std::string ExtractorSpec::describe() const {
  if (kind == ExtractorKind::lbp) {
    return lbp.describe() + ";normalize=" + (lbp_normalize ? "1" : "0");
  }
  return hog.describe();
}

std::vector<double> extract_one(const GrayImage& img, const ExtractorSpec& spec) {
  if (spec.kind == ExtractorKind::lbp) return lbp_histogram(img, spec.lbp, spec.lbp_normalize).bins;
  return hog_features(img, spec.hog).values;
}

FeatureMatrix extract_features(const LabeledImageSet& set, const ExtractorSpec& spec) {
  FeatureMatrix out;
  out.meta.extractor = spec.name();
  out.meta.params = spec.describe();
  out.meta.fingerprint = fingerprint(set);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto row = extract_one(set.images[i], spec);
    if (!out.values.empty() && row.size() != out.dim()) {
      const std::string src = i < set.sources.size() ? set.sources[i] : std::to_string(i);
      throw ParameterError("image " + src + " yields " + std::to_string(row.size()) +
                           " features, expected " + std::to_string(out.dim()) +
                           " (images differ in size)");
    }
    out.values.push_row(row);
    out.labels.push_back(set.class_names[static_cast<std::size_t>(set.labels[i])]);
  }
  return out;
}

}  // namespace texbench
