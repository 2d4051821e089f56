#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tsunet/data/image.hpp"

namespace tsunet {

// Synthetic shapes dataset: anti-aliased ellipses, rectangles and annuli over
// a noisy background, with exact masks from the analytic shape membership.
// Fully reproducible from the seed.
//
// With noise_sigma == 0 the generator degenerates to a per-class intensity
// lookup (no anti-aliasing, no jitter), so the image is an exact function of
// the mask.
struct SynthOptions {
  std::size_t count = 8;
  std::size_t size = 64;
  std::size_t num_classes = 2;
  std::uint64_t seed = 0;
  double noise_sigma = 0.05;
  std::size_t max_shapes = 3;
};

namespace detail {

struct SynthShape {
  int kind = 0;  // 0 ellipse, 1 rectangle, 2 annulus
  double cx = 0, cy = 0, rx = 1, ry = 1;
  std::uint8_t cls = 1;
  double delta = 0.3;

  bool inside(double x, double y) const {
    const double dx = (x - cx) / rx, dy = (y - cy) / ry;
    switch (kind) {
      case 0: return dx * dx + dy * dy <= 1.0;
      case 1: return std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
      default: {
        const double q = dx * dx + dy * dy;
        return q <= 1.0 && q >= 0.25;  // inner radius at half
      }
    }
  }
};

}  // namespace detail

// Generates one image/mask pair, consuming draws from rng. The image is a
// plane in [0,1]; the mask stores class indices.
inline void synth_sample(std::mt19937_64& rng, const SynthOptions& opt,
                         std::vector<std::uint8_t>& image, std::vector<std::uint8_t>& mask) {
  const std::size_t S = opt.size;
  const double sz = static_cast<double>(S);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const bool plain = opt.noise_sigma == 0.0;

  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> img(S * S, plain ? 0.4 : 0.35 + 0.2 * unit(rng));
    mask.assign(S * S, 0);

    const std::size_t n_shapes = 1 + static_cast<std::size_t>(
                                         unit(rng) * static_cast<double>(opt.max_shapes));
    std::vector<detail::SynthShape> shapes;
    for (std::size_t s = 0; s < std::min(n_shapes, opt.max_shapes); ++s) {
      detail::SynthShape sh;
      sh.kind = static_cast<int>(unit(rng) * 3.0) % 3;
      sh.cx = (0.2 + 0.6 * unit(rng)) * sz;
      sh.cy = (0.2 + 0.6 * unit(rng)) * sz;
      sh.rx = std::max(3.0, (0.08 + 0.18 * unit(rng)) * sz);
      sh.ry = std::max(3.0, (0.08 + 0.18 * unit(rng)) * sz);
      sh.cls = opt.num_classes <= 2
                   ? std::uint8_t(1)
                   : static_cast<std::uint8_t>(
                         1 + static_cast<std::size_t>(unit(rng) *
                                                      double(opt.num_classes - 1)) %
                                 (opt.num_classes - 1));
      const double magnitude = 0.15 + 0.2 * unit(rng);
      sh.delta = plain ? 0.15 + 0.2 * double(sh.cls)
                       : (unit(rng) < 0.5 ? -magnitude : magnitude);
      shapes.push_back(sh);
    }

    for (const auto& sh : shapes) {
      for (std::size_t r = 0; r < S; ++r)
        for (std::size_t c = 0; c < S; ++c) {
          const double x = double(c) + 0.5, y = double(r) + 0.5;
          if (sh.inside(x, y)) mask[r * S + c] = sh.cls;
          if (plain) continue;
          // 2x2 supersampled coverage for anti-aliased intensity edges
          int cover = 0;
          for (double oy : {-0.25, 0.25})
            for (double ox : {-0.25, 0.25})
              if (sh.inside(x + ox, y + oy)) ++cover;
          if (cover > 0) img[r * S + c] += sh.delta * double(cover) / 4.0;
        }
    }
    if (plain)
      for (std::size_t i = 0; i < img.size(); ++i)
        if (mask[i] > 0) img[i] = 0.15 + 0.2 * double(mask[i]);

    if (!plain && opt.noise_sigma > 0)
      for (double& v : img) v += opt.noise_sigma * gauss(rng);

    const std::size_t fg = static_cast<std::size_t>(
        std::count_if(mask.begin(), mask.end(), [](std::uint8_t m) { return m > 0; }));
    if (fg == 0 || fg == mask.size()) continue;  // reject and redraw

    image.resize(S * S);
    for (std::size_t i = 0; i < img.size(); ++i)
      image[i] = static_cast<std::uint8_t>(
          std::lround(std::clamp(img[i], 0.0, 1.0) * 255.0));
    return;
  }
  throw NumericError("synth_sample: rejection sampling failed to produce both classes");
}

// Writes <root>/images/<id>.png and <root>/masks/<id>.png; returns the ids in
// generation order.
inline std::vector<std::string> synth_dataset(const std::string& root,
                                              const SynthOptions& opt) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(root) / "images");
  fs::create_directories(fs::path(root) / "masks");
  std::mt19937_64 rng(opt.seed);
  std::vector<std::string> ids;
  std::vector<std::uint8_t> image, mask;
  for (std::size_t i = 0; i < opt.count; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "synth_%04zu", i);
    synth_sample(rng, opt, image, mask);
    save_png_gray((fs::path(root) / "images" / (std::string(buf) + ".png")).string(),
                  opt.size, opt.size, image);
    save_png_gray((fs::path(root) / "masks" / (std::string(buf) + ".png")).string(),
                  opt.size, opt.size, mask);
    ids.push_back(buf);
  }
  return ids;
}

}  // namespace tsunet
