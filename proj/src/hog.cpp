#include "texbench/hog.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "texbench/errors.hpp"

namespace texbench {

void HogParams::validate() const {
  if (cell_size < 2) throw ParameterError("HOG cell size must be >= 2");
  if (block_size < 1) throw ParameterError("HOG block size must be >= 1");
  if (orientation_bins < 2) throw ParameterError("HOG needs at least 2 orientation bins");
}

std::string HogParams::describe() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "cell=%d;block=%d;bins=%d;signed=%d", cell_size, block_size,
                orientation_bins, signed_orientation ? 1 : 0);
  return buf;
}

GradientField gradients(const GrayImage& img, bool signed_orientation) {
  const int w = img.width();
  const int h = img.height();
  if (w < 3 || h < 3) throw ParameterError("HOG needs an image of at least 3x3 pixels");

  GradientField f;
  f.width = w;
  f.height = h;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  f.gx.resize(n);
  f.gy.resize(n);
  f.magnitude.resize(n);
  f.orientation.resize(n);
  const double range = signed_orientation ? 360.0 : 180.0;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double gx;
      if (x == 0) {
        gx = img.at(1, y) - img.at(0, y);
      } else if (x == w - 1) {
        gx = img.at(w - 1, y) - img.at(w - 2, y);
      } else {
        gx = 0.5 * (img.at(x + 1, y) - img.at(x - 1, y));
      }
      double gy;
      if (y == 0) {
        gy = img.at(x, 1) - img.at(x, 0);
      } else if (y == h - 1) {
        gy = img.at(x, h - 1) - img.at(x, h - 2);
      } else {
        gy = 0.5 * (img.at(x, y + 1) - img.at(x, y - 1));
      }
      double theta = std::atan2(gy, gx) * (180.0 / std::numbers::pi);
      if (theta < 0.0) theta += range;
      if (theta >= range) theta -= range;
      if (theta < 0.0) theta = 0.0;  // -0 and rounding at the seam

      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      f.gx[i] = gx;
      f.gy[i] = gy;
      f.magnitude[i] = std::sqrt(gx * gx + gy * gy);
      f.orientation[i] = theta;
    }
  }
  return f;
}

CellHistograms cell_histograms(const GradientField& field, const HogParams& params) {
  params.validate();
  CellHistograms out;
  out.cells_x = field.width / params.cell_size;
  out.cells_y = field.height / params.cell_size;
  out.bins = params.orientation_bins;
  if (out.cells_x == 0 || out.cells_y == 0) {
    throw ParameterError("image smaller than one HOG cell");
  }
  out.values.assign(static_cast<std::size_t>(out.cells_x) * out.cells_y * out.bins, 0.0);

  const double range = params.signed_orientation ? 360.0 : 180.0;
  const double width = range / params.orientation_bins;
  const int bins = params.orientation_bins;

  for (int cy = 0; cy < out.cells_y; ++cy) {
    for (int cx = 0; cx < out.cells_x; ++cx) {
      double* hist = out.values.data() + (static_cast<std::size_t>(cy) * out.cells_x + cx) * bins;
      for (int y = cy * params.cell_size; y < (cy + 1) * params.cell_size; ++y) {
        for (int x = cx * params.cell_size; x < (cx + 1) * params.cell_size; ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * field.width + x;
          const double mag = field.magnitude[i];
          if (mag == 0.0) continue;
          // Bin b is centered at (b + 0.5) * width.
          const double pos = field.orientation[i] / width - 0.5;
          const double lo = std::floor(pos);
          const double frac = pos - lo;
          const int b0 = ((static_cast<int>(lo) % bins) + bins) % bins;
          const int b1 = (b0 + 1) % bins;
          hist[b0] += (1.0 - frac) * mag;
          hist[b1] += frac * mag;
        }
      }
    }
  }
  return out;
}

std::size_t hog_length(int width, int height, const HogParams& params) {
  params.validate();
  const int blocks_x = (width / params.cell_size) / params.block_size;
  const int blocks_y = (height / params.cell_size) / params.block_size;
  return static_cast<std::size_t>(blocks_x) * blocks_y * params.block_size * params.block_size *
         params.orientation_bins;
}

HogDescriptor hog_features(const GrayImage& img, const HogParams& params) {
  params.validate();
  const GradientField field = gradients(img, params.signed_orientation);
  const CellHistograms cells = cell_histograms(field, params);

  HogDescriptor d;
  d.params = params;
  const int b = params.block_size;
  d.grid_x = cells.cells_x / b;
  d.grid_y = cells.cells_y / b;
  if (d.grid_x == 0 || d.grid_y == 0) throw ParameterError("image smaller than one HOG block");
  d.values.reserve(hog_length(img.width(), img.height(), params));

  std::vector<double> block;
  for (int by = 0; by < d.grid_y; ++by) {
    for (int bx = 0; bx < d.grid_x; ++bx) {
      block.clear();
      for (int cy = by * b; cy < (by + 1) * b; ++cy) {
        for (int cx = bx * b; cx < (bx + 1) * b; ++cx) {
          const auto c = cells.cell(cx, cy);
          block.insert(block.end(), c.begin(), c.end());
        }
      }
      double sq = 0.0;
      for (double v : block) sq += v * v;
      const double norm = std::sqrt(sq + kHogEpsilon * kHogEpsilon);
      for (double v : block) d.values.push_back(v / norm);
    }
  }
  return d;
}

}  // namespace texbench
