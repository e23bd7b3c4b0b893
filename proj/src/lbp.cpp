#include "texbench/lbp.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <numbers>

#include "texbench/errors.hpp"

namespace texbench {
namespace {

void check_points(int points) {
  if (points < 2 || points > kMaxLbpPoints) {
    throw ParameterError("LBP points must be in [2, " + std::to_string(kMaxLbpPoints) +
                         "], got " + std::to_string(points));
  }
}

std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t result = n;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

// Relative sample position split into an integer corner and a fractional part.
struct Tap {
  int dx = 0;
  int dy = 0;
  double fx = 0.0;
  double fy = 0.0;
};

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

std::vector<Tap> circle_taps(const LbpParams& params) {
  std::vector<Tap> taps(static_cast<std::size_t>(params.points));
  for (int k = 0; k < params.points; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / params.points;
    const double x = snap(params.radius * std::cos(theta));
    const double y = snap(-params.radius * std::sin(theta));
    Tap& t = taps[static_cast<std::size_t>(k)];
    t.dx = static_cast<int>(std::floor(x));
    t.dy = static_cast<int>(std::floor(y));
    t.fx = x - t.dx;
    t.fy = y - t.dy;
  }
  return taps;
}

// Interpolated as nested lerps so that constant regions reproduce the constant exactly.
double bilinear(const GrayImage& img, int x, int y, double fx, double fy) {
  const double a = img.at(x, y);
  const double top = fx > 0.0 ? a + fx * (img.at(x + 1, y) - a) : a;
  if (fy <= 0.0) return top;
  const double c = img.at(x, y + 1);
  const double bottom = fx > 0.0 ? c + fx * (img.at(x + 1, y + 1) - c) : c;
  return top + fy * (bottom - top);
}

int margin(const LbpParams& params) { return static_cast<int>(std::ceil(params.radius - 1e-9)); }

}  // namespace

void LbpParams::validate() const {
  check_points(points);
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ParameterError("LBP radius must be positive");
  }
}

std::string LbpParams::describe() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "points=%d;radius=%g", points, radius);
  return buf;
}

std::uint64_t necklace_count(int points) {
  check_points(points);
  const auto p = static_cast<std::uint64_t>(points);
  std::uint64_t total = 0;
  for (std::uint64_t d = 1; d <= p; ++d) {
    if (p % d == 0) total += euler_phi(d) * (std::uint64_t{1} << (p / d));
  }
  return total / p;
}

std::uint32_t min_rotation(std::uint32_t word, int bits) {
  const std::uint32_t mask = bits >= 32 ? ~0u : ((1u << bits) - 1u);
  word &= mask;
  std::uint32_t best = word;
  std::uint32_t r = word;
  for (int i = 1; i < bits; ++i) {
    r = ((r >> 1) | (r << (bits - 1))) & mask;
    if (r < best) best = r;
  }
  return best;
}

NecklaceTable::NecklaceTable(int points) : points_(points) {
  check_points(points);
  const std::uint32_t words = 1u << points;
  ids_.resize(words);
  representatives_.reserve(necklace_count(points));
  // Every non-minimal word has a smaller minimal rotation, already assigned.
  for (std::uint32_t w = 0; w < words; ++w) {
    const std::uint32_t m = min_rotation(w, points);
    if (m == w) {
      ids_[w] = static_cast<std::uint32_t>(representatives_.size());
      representatives_.push_back(w);
    } else {
      ids_[w] = ids_[m];
    }
  }
}

const NecklaceTable& NecklaceTable::get(int points) {
  check_points(points);
  static std::array<std::once_flag, kMaxLbpPoints + 1> once;
  static std::array<std::unique_ptr<NecklaceTable>, kMaxLbpPoints + 1> tables;
  const auto i = static_cast<std::size_t>(points);
  std::call_once(once[i], [&] { tables[i] = std::make_unique<NecklaceTable>(points); });
  return *tables[i];
}

std::vector<double> sample_circle(const GrayImage& img, int cx, int cy, const LbpParams& params) {
  params.validate();
  const auto taps = circle_taps(params);
  std::vector<double> out;
  out.reserve(taps.size());
  for (const Tap& t : taps) {
    const int x = cx + t.dx;
    const int y = cy + t.dy;
    const int x1 = x + (t.fx > 0.0 ? 1 : 0);
    const int y1 = y + (t.fy > 0.0 ? 1 : 0);
    if (x < 0 || y < 0 || x1 >= img.width() || y1 >= img.height()) {
      throw ParameterError("sampling circle leaves the image at (" + std::to_string(cx) + ", " +
                           std::to_string(cy) + ")");
    }
    out.push_back(bilinear(img, x, y, t.fx, t.fy));
  }
  return out;
}

std::uint32_t lbp_code(std::span<const double> neighbors, double center) {
  const int points = static_cast<int>(neighbors.size());
  const NecklaceTable& table = NecklaceTable::get(points);
  std::uint32_t word = 0;
  for (int k = 0; k < points; ++k) {
    if (neighbors[static_cast<std::size_t>(k)] >= center - kLbpTieTolerance) word |= 1u << k;
  }
  return table.id(word);
}

LbpHistogram lbp_histogram(const GrayImage& img, const LbpParams& params, bool normalize) {
  params.validate();
  const int m = margin(params);
  if (img.width() <= 2 * m + 1 || img.height() <= 2 * m + 1) {
    throw ParameterError("image " + std::to_string(img.width()) + "x" +
                         std::to_string(img.height()) + " too small for LBP radius " +
                         std::to_string(params.radius));
  }
  const NecklaceTable& table = NecklaceTable::get(params.points);
  const auto taps = circle_taps(params);

  std::vector<std::uint64_t> counts(table.size(), 0);
  for (int y = m; y < img.height() - m; ++y) {
    for (int x = m; x < img.width() - m; ++x) {
      const double center = img.at(x, y);
      std::uint32_t word = 0;
      for (std::size_t k = 0; k < taps.size(); ++k) {
        const Tap& t = taps[k];
        if (bilinear(img, x + t.dx, y + t.dy, t.fx, t.fy) >= center - kLbpTieTolerance) word |= 1u << k;
      }
      ++counts[table.id(word)];
    }
  }

  LbpHistogram hist;
  hist.params = params;
  hist.bins.assign(counts.begin(), counts.end());
  if (normalize) {
    double total = 0.0;
    for (auto c : counts) total += static_cast<double>(c);
    for (double& b : hist.bins) b /= total;
  }
  return hist;
}

}  // namespace texbench
