#pragma once

#include "cwvo/consistency.hpp"
#include "cwvo/image.hpp"

namespace cwvo {

/// Lower clip bound of pairwise quality maps.
inline constexpr double kQualityFloor = 1e-4;
/// Stabiliser inside the square root of the tracking weights.
inline constexpr double kWeightEpsilon = 1e-4;

/// Per-pixel log-covariance maps for the adjacent pair (frame_j, frame_i).
struct UncertaintyPair {
  ImageD log_photo;
  ImageD log_geo;
  int frame_j = -1;
  int frame_i = -1;
};

struct QualityMap {
  ImageD values;
  Branch branch = Branch::kPhoto;

  int width() const noexcept { return values.width(); }
  int height() const noexcept { return values.height(); }
};

/// Host-side quality attached to a keyframe. `finalized` is set once both the
/// incoming and outgoing adjacent pairs have been fused.
struct QualityPrior {
  QualityMap photo;
  QualityMap geo;
  int host_id = -1;
  bool finalized = false;
};

struct WeightMaps {
  ImageD photo;
  ImageD geo;
};

/// Median of a non-empty sample; even counts average the two central values.
double median_of(std::vector<double> values);

/// clip(m / exp(l(p)), eps_q, 1) with m the spatial median of exp(l).
QualityMap pairwise_quality(const ImageD& log_covariance, Branch branch);

/// Pixelwise geometric mean of the two pairwise maps flanking a keyframe.
QualityMap fuse_bidirectional(const QualityMap& previous, const QualityMap& next);

QualityPrior provisional_prior(const QualityMap& photo, const QualityMap& geo, int host_id);
/// Folds the second adjacent pair into a provisional prior.
QualityPrior finalize_prior(const QualityPrior& provisional, const QualityMap& photo_next,
                            const QualityMap& geo_next);
/// Q = 1 everywhere; what the baseline tracker runs with.
QualityPrior unit_prior(int width, int height, int host_id);

/// w = sqrt(Q + eps) per branch.
WeightMaps weights_from_prior(const QualityPrior& prior);

}  // namespace cwvo
