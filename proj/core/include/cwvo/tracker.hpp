#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cwvo/frame.hpp"
#include "cwvo/geometry.hpp"
#include "cwvo/pixel_selector.hpp"
#include "cwvo/quality_prior.hpp"

namespace cwvo {

struct TrackingConfig {
  int levels = 4;
  int max_iterations = 20;
  double convergence = 1e-6;
  double huber = 9.0 / 255.0;
  double min_valid_fraction = 0.2;
  double max_condition = 1e12;
  double z_min = kDefaultZMin;
  /// Keep H and b of every accepted linearisation in the level reports.
  bool record_normal_equations = false;

  void validate() const;
};

/// Host keyframe: image, depth, world-from-camera pose, quality prior and the
/// support pixels selected on it.
struct Keyframe {
  RgbdFrame frame;
  Se3Pose world_pose;
  QualityPrior prior;
  std::vector<SupportPixel> support;
  ImagePyramid pyramid;
  int keyframe_index = 0;
};

using Jacobian = Eigen::Matrix<double, 1, 6>;

/// Linearisation of r = I_host(p) - I_target(pi(T P)) about the current pose,
/// for a left perturbation T <- exp(xi) T with xi = [t; omega].
struct PixelLinearization {
  double residual = 0.0;
  Jacobian jacobian = Jacobian::Zero();  ///< [J_tr | J_rot]
  Vec2 gradient = Vec2::Zero();          ///< target-image gradient at p'
  double inverse_depth = 0.0;            ///< 1 / z of the warped point
  Vec2 warped = Vec2::Zero();
  int host_x = 0;  ///< level-0 host coordinates, where the weights live
  int host_y = 0;
  bool valid = false;
};

struct NormalEquations {
  Mat6 hessian = Mat6::Zero();
  Vec6 gradient = Vec6::Zero();
  double energy = 0.0;  ///< summed Huber energy of the weighted residuals
  int valid_count = 0;
  int total_count = 0;

  double mean_energy() const { return valid_count > 0 ? energy / valid_count : 0.0; }
};

/// `host` and `target` are the level-`level` images and `k` the matching
/// intrinsics; the support pixel is mapped to that level by floor-halving.
PixelLinearization linearize_pixel(const ImageD& host, const ImageD& target,
                                   const Intrinsics& k, const Se3Pose& pose,
                                   const SupportPixel& pixel, int level,
                                   double z_min = kDefaultZMin);

/// Huber-robustified weighted normal equations. With `weights` and
/// apply_decoupled set, each row becomes [w_p w_g J_tr | w_p J_rot] and the
/// residual w_p r; otherwise both weights are 1. Sums in input order.
NormalEquations accumulate_weighted(std::span<const PixelLinearization> lins,
                                    const WeightMaps* weights, bool apply_decoupled,
                                    double huber);

/// Throws kTrackingDegenerate when fewer than `min_fraction` rows are valid.
void require_valid_fraction(const NormalEquations& ne, double min_fraction);

struct LevelReport {
  int level = 0;
  int iterations = 0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double valid_fraction = 0.0;
  bool decoupled = false;
  std::vector<double> accepted_energies;
  std::vector<NormalEquations> normal_equations;
};

struct TrackResult {
  Se3Pose pose;  ///< camera-from-host
  std::vector<LevelReport> levels;
};

/// Gauss-Newton at one pyramid level, starting from `init` (camera-from-host).
Se3Pose solve_level(const Keyframe& host, const ImagePyramid& target, const Se3Pose& init,
                    int level, const WeightMaps* weights, const TrackingConfig& config,
                    LevelReport* report = nullptr);

/// Coarse-to-fine alignment; prior weights are only applied at level 0.
TrackResult track_frame(const Keyframe& host, const ImagePyramid& target, const Se3Pose& init,
                        const WeightMaps* weights, const TrackingConfig& config);

}  // namespace cwvo
