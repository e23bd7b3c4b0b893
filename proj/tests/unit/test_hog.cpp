#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "suites.hpp"
#include "texbench/errors.hpp"
#include "texbench/hog.hpp"

using namespace texbench;

namespace {

GrayImage from_fn(int w, int h, double (*f)(int, int)) {
  std::vector<double> px;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) px.push_back(f(x, y));
  return GrayImage(w, h, px);
}

}  // namespace

TEST_CASE("gradients") {
  SUBCASE("constant image has no gradient") {
    const auto g = gradients(GrayImage(6, 5, 40.0), false);
    for (double m : g.magnitude) CHECK(m == 0.0);
  }
  SUBCASE("horizontal ramp") {
    const auto g = gradients(from_fn(8, 6, [](int x, int) { return double(x); }), false);
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 8; ++x) {
        const auto i = static_cast<std::size_t>(y * 8 + x);
        CHECK(g.gx[i] == 1.0);
        CHECK(g.gy[i] == 0.0);
        CHECK(g.orientation[i] == 0.0);
      }
    }
  }
  SUBCASE("vertical ramp points at 90 degrees") {
    const auto g = gradients(from_fn(5, 5, [](int, int y) { return 2.0 * y; }), false);
    CHECK(g.gy[12] == 2.0);
    CHECK(g.orientation[12] == doctest::Approx(90.0));
  }
  SUBCASE("unsigned orientations fold into [0, 180)") {
    const auto u = gradients(from_fn(5, 5, [](int x, int) { return 100.0 - 3.0 * x; }), false);
    const auto s = gradients(from_fn(5, 5, [](int x, int) { return 100.0 - 3.0 * x; }), true);
    CHECK(u.orientation[12] == doctest::Approx(0.0));
    CHECK(s.orientation[12] == doctest::Approx(180.0));
  }
  SUBCASE("random 5x5 against per-pixel differences") {
    std::mt19937_64 rng(3);
    const auto img = oracle::random_image(rng, 5, 5);
    const auto g = gradients(img, false);
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 5; ++x) {
        const double gx = x == 0 ? img.at(1, y) - img.at(0, y)
                          : x == 4 ? img.at(4, y) - img.at(3, y)
                                   : (img.at(x + 1, y) - img.at(x - 1, y)) / 2;
        const double gy = y == 0 ? img.at(x, 1) - img.at(x, 0)
                          : y == 4 ? img.at(x, 4) - img.at(x, 3)
                                   : (img.at(x, y + 1) - img.at(x, y - 1)) / 2;
        const auto i = static_cast<std::size_t>(y * 5 + x);
        CHECK(g.gx[i] == gx);
        CHECK(g.gy[i] == gy);
        CHECK(g.magnitude[i] == doctest::Approx(std::hypot(gx, gy)));
      }
    }
  }
}

TEST_CASE("cell histograms") {
  HogParams p;
  SUBCASE("308x168 with 18-pixel cells gives 17 x 9 cells") {
    const auto c = cell_histograms(gradients(GrayImage(308, 168, 0.0), false), p);
    CHECK(c.cells_x == 17);
    CHECK(c.cells_y == 9);
    for (double v : c.values) CHECK(v == 0.0);
  }
  SUBCASE("gradients at a bin center vote into that bin only") {
    // Bins are 22.5 degrees wide with centers at (b + 0.5) * 22.5, so 33.75 is the
    // center of bin 1. A plane with gy/gx = tan(33.75) has that orientation at
    // every pixel.
    const double t = std::tan(33.75 * 3.14159265358979323846 / 180.0);
    std::vector<double> px;
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x) px.push_back(10.0 + 4.0 * x + 4.0 * t * y);
    p.cell_size = 6;
    const auto c = cell_histograms(gradients(GrayImage(6, 6, px), false), p);
    REQUIRE(c.values.size() == 8);
    for (int b = 0; b < 8; ++b) {
      if (b == 1) {
        CHECK(c.values[1] > 0.0);
      } else {
        CHECK(c.values[static_cast<std::size_t>(b)] == doctest::Approx(0.0).epsilon(1e-9));
      }
    }
  }
  SUBCASE("no full cell") {
    CHECK_THROWS_AS(cell_histograms(gradients(GrayImage(17, 40, 0.0), false), p), ParameterError);
  }
}

TEST_CASE("descriptor") {
  std::mt19937_64 rng(8);
  SUBCASE("308x168 reference geometry gives 1224 values") {
    const auto img = oracle::random_image(rng, 308, 168);
    const auto d = hog_features(img, {});
    CHECK(d.values.size() == 1224);
    CHECK(hog_length(308, 168, {}) == 1224);
    CHECK(HogParams{}.describe() == "cell=18;block=1;bins=8;signed=0");
  }
  SUBCASE("length formula across parameters") {
    for (int cell : {4, 6, 9}) {
      for (int block : {1, 2, 3}) {
        for (int bins : {4, 8, 9}) {
          const HogParams p{cell, block, bins, false};
          const auto img = oracle::random_image(rng, 40, 31);
          const auto d = hog_features(img, p);
          const std::size_t bx = static_cast<std::size_t>((40 / cell) / block);
          const std::size_t by = static_cast<std::size_t>((31 / cell) / block);
          CHECK(d.values.size() == bx * by * block * block * bins);
          CHECK(d.values.size() == hog_length(40, 31, p));
        }
      }
    }
  }
  SUBCASE("constant image gives a zero descriptor") {
    const auto d = hog_features(GrayImage(36, 36, 120.0), {});
    for (double v : d.values) CHECK(v == 0.0);
  }
  SUBCASE("entries in [0, 1] and each cell slice has norm at most 1") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto d = hog_features(oracle::random_image(rng, 54, 36), {});
      for (std::size_t c = 0; c < d.values.size(); c += 8) {
        double sq = 0.0;
        for (std::size_t b = c; b < c + 8; ++b) {
          CHECK(d.values[b] >= 0.0);
          CHECK(d.values[b] <= 1.0);
          sq += d.values[b] * d.values[b];
        }
        CHECK(std::sqrt(sq) <= 1.0 + 1e-12);
      }
    }
  }
  SUBCASE("brightness shift invariance and contrast invariance") {
    const auto img = oracle::random_image(rng, 36, 36, 100);
    std::vector<double> shifted = img.data(), scaled = img.data();
    for (double& v : shifted) v += 50.0;
    for (double& v : scaled) v *= 2.5;
    const auto a = hog_features(img, {});
    const auto b = hog_features(GrayImage(36, 36, shifted), {});
    const auto c = hog_features(GrayImage(36, 36, scaled), {});
    const auto raw_a = cell_histograms(gradients(img, false), {});
    const auto raw_c = cell_histograms(gradients(GrayImage(36, 36, scaled), false), {});
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
      CHECK(std::abs(a.values[i] - c.values[i]) < 1e-6);
      CHECK(raw_c.values[i] == doctest::Approx(2.5 * raw_a.values[i]));
    }
  }
}

TEST_CASE("descriptor matches a straight-line reimplementation on random 40x40 images") {
  const auto r = oracle::hog_suite(20);
  INFO(r.detail);
  CHECK(r.passed);
}
