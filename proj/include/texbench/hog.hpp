#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "texbench/image.hpp"

namespace texbench {

struct HogParams {
  int cell_size = 18;
  int block_size = 1;
  int orientation_bins = 8;
  bool signed_orientation = false;

  void validate() const;
  std::string describe() const;
};

inline constexpr double kHogEpsilon = 1e-5;

struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> magnitude;
  std::vector<double> orientation;  // degrees, [0, 180) unsigned or [0, 360) signed
  std::vector<double> gx;
  std::vector<double> gy;
};

struct CellHistograms {
  int cells_x = 0;
  int cells_y = 0;
  int bins = 0;
  std::vector<double> values;  // row-major cells, bins innermost

  std::span<const double> cell(int cx, int cy) const {
    return {values.data() + (static_cast<std::size_t>(cy) * cells_x + cx) * bins,
            static_cast<std::size_t>(bins)};
  }
};

struct HogDescriptor {
  std::vector<double> values;
  int grid_x = 0;  // blocks across
  int grid_y = 0;  // blocks down
  HogParams params;
};

// Centered differences (I[x+1] - I[x-1]) / 2, one-sided at the borders.
GradientField gradients(const GrayImage& img, bool signed_orientation = false);

// Full cells only; each magnitude is split linearly between the two nearest
// orientation-bin centers (circularly).
CellHistograms cell_histograms(const GradientField& field, const HogParams& params);

// Non-overlapping blocks of block_size x block_size cells, each normalized by
// sqrt(|v|^2 + eps^2), concatenated row-major.
HogDescriptor hog_features(const GrayImage& img, const HogParams& params);

// Output length for a given image size.
std::size_t hog_length(int width, int height, const HogParams& params);

}  // namespace texbench
