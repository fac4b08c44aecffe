#include "cwvo/pixel_selector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cwvo/consistency.hpp"

namespace cwvo {

Vec2 central_gradient(const ImageD& image, int x, int y) {
  if (x < 1 || y < 1 || x > image.width() - 2 || y > image.height() - 2) {
    throw Error(ErrorKind::kInvalidArgument, "central_gradient: border pixel");
  }
  return {0.5 * (image(x + 1, y) - image(x - 1, y)), 0.5 * (image(x, y + 1) - image(x, y - 1))};
}

double gradient_score(const ImageD& image, int x, int y, const Vec2& direction) {
  const Vec2 g = central_gradient(image, x, y);
  return std::abs(g.x() * direction.x() + g.y() * direction.y());
}

BlockThresholds adaptive_threshold(const ImageD& image, const SelectorConfig& config) {
  if (config.block_size < 1) throw Error(ErrorKind::kInvalidArgument, "block size must be >= 1");
  BlockThresholds t;
  t.block_size = config.block_size;
  t.blocks_x = (image.width() + config.block_size - 1) / config.block_size;
  t.blocks_y = (image.height() + config.block_size - 1) / config.block_size;
  t.theta.reserve(static_cast<std::size_t>(t.blocks_x * t.blocks_y));
  std::vector<double> magnitudes;
  for (int by = 0; by < t.blocks_y; ++by) {
    for (int bx = 0; bx < t.blocks_x; ++bx) {
      magnitudes.clear();
      const int x_end = std::min((bx + 1) * config.block_size, image.width() - 1);
      const int y_end = std::min((by + 1) * config.block_size, image.height() - 1);
      for (int y = std::max(by * config.block_size, 1); y < y_end; ++y) {
        for (int x = std::max(bx * config.block_size, 1); x < x_end; ++x) {
          magnitudes.push_back(central_gradient(image, x, y).norm());
        }
      }
      const double median = magnitudes.empty() ? 0.0 : median_of(magnitudes);
      t.theta.push_back(std::max(median + config.gradient_offset, config.min_threshold));
    }
  }
  return t;
}

std::vector<SupportPixel> select_support(const ImageD& intensity, const ImageD& depth,
                                         const QualityMap& photo_quality,
                                         const SelectorConfig& config) {
  require_same_shape(intensity, depth, "select_support: depth size differs");
  require_same_shape(intensity, photo_quality.values, "select_support: quality size differs");
  if (config.budget < 1) throw Error(ErrorKind::kInvalidArgument, "select_support: budget < 1");
  if (config.cell_size < 1) throw Error(ErrorKind::kInvalidArgument, "cell size must be >= 1");

  const BlockThresholds thresholds = adaptive_threshold(intensity, config);
  const int border = std::max(config.border, 1);
  const int w = intensity.width();
  const int h = intensity.height();

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  std::vector<SupportPixel> candidates;
  for (int cy = 0; cy < h; cy += config.cell_size) {
    for (int cx = 0; cx < w; cx += config.cell_size) {
      const double a = angle(rng);
      const Vec2 dir(std::cos(a), std::sin(a));
      SupportPixel best;
      bool found = false;
      for (int y = std::max(cy, border); y < std::min(cy + config.cell_size, h - border); ++y) {
        for (int x = std::max(cx, border); x < std::min(cx + config.cell_size, w - border); ++x) {
          if (!is_valid_depth(depth(x, y))) continue;
          const Vec2 g = central_gradient(intensity, x, y);
          const double s = std::abs(g.x() * dir.x() + g.y() * dir.y());
          if (!found || s > best.score) {
            best = {x, y, depth(x, y), s, 0.0, g};
            found = true;
          }
        }
      }
      if (!found || !(best.score > thresholds.at_pixel(best.x, best.y))) continue;
      best.modulated = best.score * photo_quality.values(best.x, best.y);
      candidates.push_back(best);
    }
  }

  const auto row_major = [w](const SupportPixel& p) {
    return static_cast<long long>(p.y) * w + p.x;
  };
  std::sort(candidates.begin(), candidates.end(),
            [&](const SupportPixel& a, const SupportPixel& b) {
              if (a.modulated != b.modulated) return a.modulated > b.modulated;
              return row_major(a) < row_major(b);
            });
  if (candidates.size() > static_cast<std::size_t>(config.budget)) {
    candidates.resize(static_cast<std::size_t>(config.budget));
  }
  return candidates;
}

}  // namespace cwvo
