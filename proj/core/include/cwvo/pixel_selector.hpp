#pragma once

#include <cstdint>
#include <vector>

#include "cwvo/geometry.hpp"
#include "cwvo/image.hpp"
#include "cwvo/quality_prior.hpp"

namespace cwvo {

struct SelectorConfig {
  int block_size = 32;
  int cell_size = 4;
  int border = 2;
  double gradient_offset = 7.0 / 255.0;
  double min_threshold = 7.0 / 255.0;
  int budget = 800;
  std::uint64_t seed = 0;
};

struct SupportPixel {
  int x = 0;
  int y = 0;
  double depth = 0.0;
  double score = 0.0;      ///< |grad I . d|
  double modulated = 0.0;  ///< score * Q_photo(p)
  Vec2 gradient = Vec2::Zero();

  friend bool operator==(const SupportPixel&, const SupportPixel&) = default;
};

/// Central-difference gradient at an interior pixel.
Vec2 central_gradient(const ImageD& image, int x, int y);

/// |grad I(p) . dir| for an interior pixel.
double gradient_score(const ImageD& image, int x, int y, const Vec2& direction);

struct BlockThresholds {
  int block_size = 0;
  int blocks_x = 0;
  int blocks_y = 0;
  std::vector<double> theta;

  double at_pixel(int x, int y) const {
    return theta[static_cast<std::size_t>((y / block_size) * blocks_x + x / block_size)];
  }
};

/// Per-block median gradient magnitude plus offset, floored at min_threshold.
BlockThresholds adaptive_threshold(const ImageD& image, const SelectorConfig& config);

/// Top-K candidates by quality-modulated score among those whose raw score
/// clears the block threshold. Ties break in row-major order; the result is
/// ordered by rank.
std::vector<SupportPixel> select_support(const ImageD& intensity, const ImageD& depth,
                                         const QualityMap& photo_quality,
                                         const SelectorConfig& config);

}  // namespace cwvo
