#pragma once

#include <cmath>
#include <vector>

#include "cwvo/geometry.hpp"
#include "cwvo/image.hpp"

namespace cwvo {

enum class Branch { kPhoto, kGeo };

/// Displacement f_{j->i} stored on the frame-i grid: the scene point seen at
/// pixel p of frame i was at p - f(p) in frame j.
struct FlowField {
  ImageD dx;
  ImageD dy;
  Mask valid;

  FlowField() = default;
  FlowField(int width, int height) : dx(width, height), dy(width, height), valid(width, height, 1) {}

  int width() const noexcept { return dx.width(); }
  int height() const noexcept { return dx.height(); }
};

struct ErrorMap {
  ImageD values;
  Mask valid;
  Branch kind = Branch::kPhoto;

  int width() const noexcept { return values.width(); }
  int height() const noexcept { return values.height(); }
};

inline constexpr double kGeometricEpsilon = 1e-6;

inline bool is_valid_depth(double d) noexcept { return d > 0.0 && d < 1e300; }

/// e_photo(p) = |I_j(p - f(p)) - I_i(p)| on the frame-i grid, bilinear lookup.
ErrorMap photometric_error_map(const ImageD& image_j, const ImageD& image_i,
                               const FlowField& flow);

/// e_geo(p) = |d_proj(p) - D_i(p')| / (D_i(p') + eps) on the frame-j grid, with
/// D_i read at the nearest pixel to p'. `relative` maps frame-j points into frame i.
ErrorMap geometric_error_map(const ImageD& depth_j, const ImageD& depth_i,
                             const Se3Pose& relative, const Intrinsics& k);

/// Laplacian heteroscedastic NLL summed over valid pixels: e * exp(-l) + l.
double nll_score(const ErrorMap& error, const ImageD& log_covariance);

/// Per-pixel loss; minimised at l = ln(e) where it equals 1 + ln(e).
inline double nll_pixel(double error, double log_covariance) {
  return error * std::exp(-log_covariance) + log_covariance;
}

std::vector<ErrorMap> multiscale_pool(const ErrorMap& map, int num_levels);
std::vector<ImageD> multiscale_pool(const ImageD& map, int num_levels);

}  // namespace cwvo
