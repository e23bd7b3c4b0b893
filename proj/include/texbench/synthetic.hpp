#pragma once

#include <cstdint>
#include <vector>

#include "texbench/dataset.hpp"

namespace texbench {

// Sinusoidal gratings with a per-class spatial period, random orientation and
// phase per image, plus additive Gaussian noise, clamped to [0, 255].
// The default size keeps raw LBP histogram distances in the range where an RBF
// kernel with gamma around 1e-6 is informative.
struct GratingOptions {
  std::vector<double> periods{4.0, 7.0, 12.0, 20.0};  // one class per entry, pixels
  int per_class = 50;
  int width = 96;
  int height = 96;
  double amplitude = 60.0;
  double noise_sigma = 12.0;
  std::uint64_t seed = 7;
};

// Class names are "A", "B", ...; sources are "<class><i>.png".
LabeledImageSet make_grating_corpus(const GratingOptions& options);

// Writes the corpus as PNGs under root using the filename-prefix layout.
void write_corpus(const std::filesystem::path& root, const LabeledImageSet& set);

}  // namespace texbench
