#include "cwvo/quality_prior.hpp"

#include <algorithm>
#include <cmath>

namespace cwvo {

double median_of(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "median of empty set");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

QualityMap pairwise_quality(const ImageD& log_covariance, Branch branch) {
  if (log_covariance.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "pairwise_quality: empty map");
  }
  std::vector<double> sigma(log_covariance.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!std::isfinite(log_covariance[i])) {
      throw Error(ErrorKind::kInvalidArgument, "pairwise_quality: non-finite log-covariance");
    }
    sigma[i] = std::exp(log_covariance[i]);
  }
  const double m = median_of(sigma);
  QualityMap q{ImageD(log_covariance.width(), log_covariance.height()), branch};
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    q.values[i] = std::clamp(m / sigma[i], kQualityFloor, 1.0);
  }
  return q;
}

QualityMap fuse_bidirectional(const QualityMap& previous, const QualityMap& next) {
  if (previous.branch != next.branch) {
    throw Error(ErrorKind::kInvalidArgument, "fuse_bidirectional: branch mismatch");
  }
  if (!previous.values.same_shape(next.values)) {
    throw Error(ErrorKind::kInvalidArgument, "fuse_bidirectional: shape mismatch");
  }
  QualityMap fused{ImageD(previous.width(), previous.height()), previous.branch};
  for (std::size_t i = 0; i < fused.values.size(); ++i) {
    fused.values[i] = std::sqrt(previous.values[i] * next.values[i]);
  }
  return fused;
}

QualityPrior provisional_prior(const QualityMap& photo, const QualityMap& geo, int host_id) {
  if (photo.branch != Branch::kPhoto || geo.branch != Branch::kGeo) {
    throw Error(ErrorKind::kInvalidArgument, "provisional_prior: branch tags swapped");
  }
  return {photo, geo, host_id, false};
}

QualityPrior finalize_prior(const QualityPrior& provisional, const QualityMap& photo_next,
                            const QualityMap& geo_next) {
  return {fuse_bidirectional(provisional.photo, photo_next),
          fuse_bidirectional(provisional.geo, geo_next), provisional.host_id, true};
}

QualityPrior unit_prior(int width, int height, int host_id) {
  return {{ImageD(width, height, 1.0), Branch::kPhoto},
          {ImageD(width, height, 1.0), Branch::kGeo},
          host_id,
          true};
}

WeightMaps weights_from_prior(const QualityPrior& prior) {
  WeightMaps w{ImageD(prior.photo.width(), prior.photo.height()),
               ImageD(prior.geo.width(), prior.geo.height())};
  for (std::size_t i = 0; i < w.photo.size(); ++i) {
    w.photo[i] = std::sqrt(prior.photo.values[i] + kWeightEpsilon);
  }
  for (std::size_t i = 0; i < w.geo.size(); ++i) {
    w.geo[i] = std::sqrt(prior.geo.values[i] + kWeightEpsilon);
  }
  return w;
}

}  // namespace cwvo
