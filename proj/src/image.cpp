#include "texbench/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <opencv2/imgproc.hpp>

#include "texbench/errors.hpp"

namespace texbench {

GrayImage::GrayImage(int width, int height, double fill)
    : GrayImage(width, height,
                std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                        static_cast<std::size_t>(std::max(height, 0)),
                                    fill)) {}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) throw ParameterError("negative image size");
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ParameterError("image data has " + std::to_string(data_.size()) + " values, expected " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
  for (double v : data_) {
    if (!std::isfinite(v) || v < 0.0 || v > 255.0) {
      throw ParameterError("pixel value outside [0, 255]: " + std::to_string(v));
    }
  }
}

double luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  // The weights sum to 1 only up to rounding; keep gray inputs inside the range.
  return std::clamp(y, 0.0, 255.0);
}

GrayImage to_grayscale(const RgbImage& rgb) {
  const std::size_t n = static_cast<std::size_t>(rgb.width) * static_cast<std::size_t>(rgb.height);
  if (rgb.rgb.size() != 3 * n) throw ParameterError("RGB buffer does not match image size");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = luma(rgb.rgb[3 * i], rgb.rgb[3 * i + 1], rgb.rgb[3 * i + 2]);
  }
  return GrayImage(rgb.width, rgb.height, std::move(out));
}

GrayImage resize_area(const GrayImage& img, int width, int height) {
  if (width <= 0 || height <= 0) throw ParameterError("resize target must be positive");
  if (img.empty()) throw ParameterError("cannot resize an empty image");
  if (width == img.width() && height == img.height()) return img;
  cv::Mat src(img.height(), img.width(), CV_64F, const_cast<double*>(img.data().data()));
  cv::Mat dst;
  cv::resize(src, dst, cv::Size(width, height), 0, 0, cv::INTER_AREA);
  std::vector<double> out(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out[static_cast<std::size_t>(y) * width + x] = std::clamp(dst.at<double>(y, x), 0.0, 255.0);
    }
  }
  return GrayImage(width, height, std::move(out));
}

}  // namespace texbench
