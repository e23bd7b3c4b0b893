#include "texbench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "texbench/errors.hpp"
#include "texbench/rng.hpp"

namespace texbench {

LabeledImageSet make_grating_corpus(const GratingOptions& options) {
  if (options.periods.empty() || options.periods.size() > 26) {
    throw ParameterError("grating corpus needs between 1 and 26 periods");
  }
  if (options.per_class < 1 || options.width < 1 || options.height < 1) {
    throw ParameterError("grating corpus needs positive sizes and counts");
  }
  for (double p : options.periods) {
    if (!(p > 0.0)) throw ParameterError("grating periods must be positive");
  }

  LabeledImageSet set;
  for (std::size_t c = 0; c < options.periods.size(); ++c) {
    set.class_names.emplace_back(1, static_cast<char>('A' + c));
  }

  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t c = 0; c < options.periods.size(); ++c) {
    for (int i = 0; i < options.per_class; ++i) {
      Rng rng(derive_seed(options.seed, "grating", c * 100000 + static_cast<std::uint64_t>(i)));
      const double theta = rng.uniform(0.0, std::numbers::pi);
      const double phase = rng.uniform(0.0, two_pi);
      const double kx = std::cos(theta) * two_pi / options.periods[c];
      const double ky = std::sin(theta) * two_pi / options.periods[c];

      std::vector<double> px(static_cast<std::size_t>(options.width) * options.height);
      for (int y = 0; y < options.height; ++y) {
        for (int x = 0; x < options.width; ++x) {
          const double v = 128.0 + options.amplitude * std::sin(kx * x + ky * y + phase) +
                           options.noise_sigma * rng.normal();
          // Integral values so that a PNG round trip is lossless.
          px[static_cast<std::size_t>(y) * options.width + x] =
              std::clamp(std::round(v), 0.0, 255.0);
        }
      }
      set.images.emplace_back(options.width, options.height, std::move(px));
      set.labels.push_back(static_cast<int>(c));
      set.sources.push_back(set.class_names[c] + std::to_string(i + 1) + ".png");
    }
  }
  return set;
}

void write_corpus(const std::filesystem::path& root, const LabeledImageSet& set) {
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());
  for (std::size_t i = 0; i < set.size(); ++i) {
    save_gray(root / set.sources[i], set.images[i]);
  }
}

}  // namespace texbench
