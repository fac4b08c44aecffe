#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "cwvo/consistency.hpp"
#include "cwvo/frame.hpp"
#include "cwvo/quality_prior.hpp"

namespace cwvo {

/// Source of per-pair log-covariance maps for the quality prior.
class ConsistencyProvider {
 public:
  virtual ~ConsistencyProvider() = default;
  virtual UncertaintyPair get_uncertainty(const RgbdFrame& frame_j, const RgbdFrame& frame_i) = 0;
  virtual std::string name() const = 0;
};

/// l = 0 everywhere, so every quality map is exactly 1.
class ConstantProvider final : public ConsistencyProvider {
 public:
  UncertaintyPair get_uncertainty(const RgbdFrame& frame_j, const RgbdFrame& frame_i) override;
  std::string name() const override { return "constant"; }
};

/// Reads "<dir>/<j>_<i>.cmap".
class FileProvider final : public ConsistencyProvider {
 public:
  explicit FileProvider(std::filesystem::path directory) : directory_(std::move(directory)) {}
  UncertaintyPair get_uncertainty(const RgbdFrame& frame_j, const RgbdFrame& frame_i) override;
  std::string name() const override { return "file:" + directory_.string(); }

 private:
  std::filesystem::path directory_;
};

/// Ground truth consumed by the oracle: world-from-camera poses per frame and
/// flow_into[i] = flow from frame i-1 to frame i (empty for frame 0).
struct GroundTruth {
  std::vector<Se3Pose> poses;
  std::vector<FlowField> flow_into;
};

struct OracleConfig {
  double log_floor = 1e-3;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Turns the reference consistency errors of an adjacent pair into
/// pseudo-log-covariances l = ln(e + floor) (+ optional Gaussian noise).
/// Pixels the error maps leave undefined get the median of the defined ones.
class OracleProvider final : public ConsistencyProvider {
 public:
  OracleProvider(std::shared_ptr<const GroundTruth> truth, OracleConfig config = {})
      : truth_(std::move(truth)), config_(config) {}

  UncertaintyPair get_uncertainty(const RgbdFrame& frame_j, const RgbdFrame& frame_i) override;
  std::string name() const override { return "oracle"; }

  ErrorMap photometric_errors(const RgbdFrame& frame_j, const RgbdFrame& frame_i) const;
  ErrorMap geometric_errors(const RgbdFrame& frame_j, const RgbdFrame& frame_i) const;

 private:
  ImageD to_log_covariance(const ErrorMap& errors, std::uint64_t stream) const;

  std::shared_ptr<const GroundTruth> truth_;
  OracleConfig config_;
};

}  // namespace cwvo
