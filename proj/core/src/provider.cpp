#include "cwvo/provider.hpp"

#include <cmath>
#include <random>

#include "cwvo/cmap.hpp"

namespace cwvo {

UncertaintyPair ConstantProvider::get_uncertainty(const RgbdFrame& frame_j,
                                                  const RgbdFrame& frame_i) {
  const int w = frame_i.intensity.width();
  const int h = frame_i.intensity.height();
  return {ImageD(w, h, 0.0), ImageD(w, h, 0.0), frame_j.index, frame_i.index};
}

UncertaintyPair FileProvider::get_uncertainty(const RgbdFrame& frame_j, const RgbdFrame& frame_i) {
  const auto path = directory_ / cmap_filename(frame_j.index, frame_i.index);
  const std::string ids =
      " (pair " + std::to_string(frame_j.index) + "->" + std::to_string(frame_i.index) + ")";
  PlanePair planes;
  try {
    planes = read_cmap(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::kProviderIo, e.what() + ids);
  }
  if (!planes.first.same_shape(frame_i.intensity)) {
    throw Error(ErrorKind::kProviderIo, path.string() + ": map size differs from frame" + ids);
  }
  for (const ImageD* plane : {&planes.first, &planes.second}) {
    for (double v : plane->pixels()) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kProviderIo, path.string() + ": non-finite log-covariance" + ids);
      }
    }
  }
  return {std::move(planes.first), std::move(planes.second), frame_j.index, frame_i.index};
}

ErrorMap OracleProvider::photometric_errors(const RgbdFrame& frame_j,
                                            const RgbdFrame& frame_i) const {
  const auto i = static_cast<std::size_t>(frame_i.index);
  if (!truth_ || frame_i.index != frame_j.index + 1 || i >= truth_->flow_into.size() ||
      truth_->flow_into[i].dx.empty()) {
    throw Error(ErrorKind::kMissingGroundTruth,
                "no ground-truth flow for pair " + std::to_string(frame_j.index) + "->" +
                    std::to_string(frame_i.index));
  }
  return photometric_error_map(frame_j.intensity, frame_i.intensity, truth_->flow_into[i]);
}

ErrorMap OracleProvider::geometric_errors(const RgbdFrame& frame_j,
                                          const RgbdFrame& frame_i) const {
  const auto n = truth_ ? truth_->poses.size() : 0;
  if (frame_j.index < 0 || frame_i.index < 0 || static_cast<std::size_t>(frame_j.index) >= n ||
      static_cast<std::size_t>(frame_i.index) >= n) {
    throw Error(ErrorKind::kMissingGroundTruth,
                "no ground-truth pose for pair " + std::to_string(frame_j.index) + "->" +
                    std::to_string(frame_i.index));
  }
  const Se3Pose& world_j = truth_->poses[static_cast<std::size_t>(frame_j.index)];
  const Se3Pose& world_i = truth_->poses[static_cast<std::size_t>(frame_i.index)];
  return geometric_error_map(frame_j.depth, frame_i.depth, world_i.inverse() * world_j,
                             frame_j.intrinsics);
}

ImageD OracleProvider::to_log_covariance(const ErrorMap& errors, std::uint64_t stream) const {
  ImageD out(errors.width(), errors.height());
  std::vector<double> defined;
  defined.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (errors.valid[i]) {
      out[i] = std::log(errors.values[i] + config_.log_floor);
      defined.push_back(out[i]);
    }
  }
  const double fill = defined.empty() ? std::log(config_.log_floor) : median_of(defined);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!errors.valid[i]) out[i] = fill;
  }
  if (config_.noise_sigma > 0.0) {
    std::seed_seq seq{static_cast<std::uint32_t>(config_.seed),
                      static_cast<std::uint32_t>(config_.seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, config_.noise_sigma);
    for (double& v : out.pixels()) v += noise(rng);
  }
  return out;
}

UncertaintyPair OracleProvider::get_uncertainty(const RgbdFrame& frame_j,
                                                const RgbdFrame& frame_i) {
  const auto stream = (static_cast<std::uint64_t>(frame_i.index) << 1);
  return {to_log_covariance(photometric_errors(frame_j, frame_i), stream),
          to_log_covariance(geometric_errors(frame_j, frame_i), stream | 1u), frame_j.index,
          frame_i.index};
}

}  // namespace cwvo
