#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "texbench/image.hpp"

namespace texbench {

struct LbpParams {
  int points = 14;
  double radius = 4.0;

  // P in [2, 24], R > 0.
  void validate() const;
  std::string describe() const;
};

struct LbpHistogram {
  std::vector<double> bins;
  LbpParams params;
};

constexpr int kMaxLbpPoints = 24;

// Number of binary necklaces of length P (rotation classes of P-bit words).
std::uint64_t necklace_count(int points);

// Smallest value among the cyclic rotations of a `bits`-wide word.
std::uint32_t min_rotation(std::uint32_t word, int bits);

// Dense ids for rotation classes, ordered by their minimal representative.
class NecklaceTable {
 public:
  explicit NecklaceTable(int points);

  // Shared, lazily built table per P.
  static const NecklaceTable& get(int points);

  int points() const noexcept { return points_; }
  std::size_t size() const noexcept { return representatives_.size(); }
  std::uint32_t id(std::uint32_t word) const { return ids_[word]; }
  std::uint32_t representative(std::uint32_t id) const { return representatives_[id]; }

 private:
  int points_;
  std::vector<std::uint32_t> ids_;
  std::vector<std::uint32_t> representatives_;
};

// Neighbor k at (cx + R cos t, cy - R sin t), t = 2 pi k / P, bilinearly interpolated.
// Throws ParameterError when the circle leaves the image.
std::vector<double> sample_circle(const GrayImage& img, int cx, int cy, const LbpParams& params);

// Interpolated samples carry rounding noise, so a neighbor within this distance
// of the center counts as equal to it.
inline constexpr double kLbpTieTolerance = 1e-9;

// Bit k set iff neighbors[k] >= center - kLbpTieTolerance; returns the dense
// necklace id.
std::uint32_t lbp_code(std::span<const double> neighbors, double center);

// Codes of every pixel at least ceil(R) away from all borders, accumulated per
// necklace. With normalize the bins are scaled to sum to 1.
LbpHistogram lbp_histogram(const GrayImage& img, const LbpParams& params, bool normalize);

}  // namespace texbench
