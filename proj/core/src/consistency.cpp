#include "cwvo/consistency.hpp"

#include <cmath>

namespace cwvo {

ErrorMap photometric_error_map(const ImageD& image_j, const ImageD& image_i,
                               const FlowField& flow) {
  require_same_shape(image_j, image_i, "photometric_error_map: image sizes differ");
  require_same_shape(image_i, flow.dx, "photometric_error_map: flow size differs");
  require_same_shape(flow.dx, flow.dy, "photometric_error_map: flow planes differ");
  require_same_shape(flow.dx, flow.valid, "photometric_error_map: flow mask differs");

  ErrorMap out{ImageD(image_i.width(), image_i.height()),
               Mask(image_i.width(), image_i.height()), Branch::kPhoto};
  for (int y = 0; y < image_i.height(); ++y) {
    for (int x = 0; x < image_i.width(); ++x) {
      if (!flow.valid(x, y)) continue;
      const Vec2 source(x - flow.dx(x, y), y - flow.dy(x, y));
      const auto s = try_bilinear_sample(image_j, source);
      if (!s) continue;
      out.values(x, y) = std::abs(s->value - image_i(x, y));
      out.valid(x, y) = 1;
    }
  }
  return out;
}

ErrorMap geometric_error_map(const ImageD& depth_j, const ImageD& depth_i,
                             const Se3Pose& relative, const Intrinsics& k) {
  require_same_shape(depth_j, depth_i, "geometric_error_map: depth sizes differ");
  if (depth_j.width() != k.width || depth_j.height() != k.height) {
    throw Error(ErrorKind::kShape, "geometric_error_map: depth does not match intrinsics");
  }
  ErrorMap out{ImageD(depth_j.width(), depth_j.height()),
               Mask(depth_j.width(), depth_j.height()), Branch::kGeo};
  for (int y = 0; y < depth_j.height(); ++y) {
    for (int x = 0; x < depth_j.width(); ++x) {
      const double dj = depth_j(x, y);
      if (!is_valid_depth(dj)) continue;
      const auto proj = try_project(k, relative * backproject(k, Vec2(x, y), dj));
      if (!proj) continue;
      const double u = std::floor(proj->pixel.x() + 0.5);
      const double v = std::floor(proj->pixel.y() + 0.5);
      if (!(u >= 0.0 && v >= 0.0 && u < depth_i.width() && v < depth_i.height())) continue;
      const double di = depth_i(static_cast<int>(u), static_cast<int>(v));
      if (!is_valid_depth(di)) continue;
      out.values(x, y) = std::abs(proj->depth - di) / (di + kGeometricEpsilon);
      out.valid(x, y) = 1;
    }
  }
  return out;
}

double nll_score(const ErrorMap& error, const ImageD& log_covariance) {
  require_same_shape(error.values, log_covariance, "nll_score: shapes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < log_covariance.size(); ++i) {
    if (error.valid[i]) total += nll_pixel(error.values[i], log_covariance[i]);
  }
  return total;
}

std::vector<ErrorMap> multiscale_pool(const ErrorMap& map, int num_levels) {
  if (num_levels < 1) throw Error(ErrorKind::kInvalidArgument, "multiscale_pool: n_levels < 1");
  std::vector<ErrorMap> levels{map};
  for (int l = 1; l < num_levels; ++l) {
    const ErrorMap& prev = levels.back();
    ErrorMap next{downsample_mean(prev.values),
                  Mask((prev.width() + 1) / 2, (prev.height() + 1) / 2), prev.kind};
    for (int y = 0; y < next.height(); ++y) {
      for (int x = 0; x < next.width(); ++x) {
        bool all = true;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const int sx = 2 * x + dx;
            const int sy = 2 * y + dy;
            if (prev.valid.contains(sx, sy) && !prev.valid(sx, sy)) all = false;
          }
        }
        next.valid(x, y) = all ? 1 : 0;
      }
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

std::vector<ImageD> multiscale_pool(const ImageD& map, int num_levels) {
  if (num_levels < 1) throw Error(ErrorKind::kInvalidArgument, "multiscale_pool: n_levels < 1");
  std::vector<ImageD> levels{map};
  for (int l = 1; l < num_levels; ++l) levels.push_back(downsample_mean(levels.back()));
  return levels;
}

}  // namespace cwvo
