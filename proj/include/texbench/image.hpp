#pragma once

#include <cstdint>
#include <vector>

namespace texbench {

// Single-channel luminance image, row-major, values in [0, 255].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  // Throws ParameterError if the size does not match or a value is outside [0, 255].
  GrayImage(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

// Interleaved 8-bit RGB.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // size 3 * width * height, R G B order
};

// BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
double luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);
GrayImage to_grayscale(const RgbImage& rgb);

// Area-averaging resample to the target size.
GrayImage resize_area(const GrayImage& img, int width, int height);

}  // namespace texbench
