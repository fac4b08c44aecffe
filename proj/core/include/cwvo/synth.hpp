#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cwvo/config.hpp"
#include "cwvo/consistency.hpp"
#include "cwvo/frame.hpp"
#include "cwvo/geometry.hpp"
#include "cwvo/provider.hpp"

namespace cwvo {

/// Fronto-parallel plane z = depth (world frame) with a band-limited texture.
struct TexturedPlane {
  double depth = 3.0;
  double x_min = -std::numeric_limits<double>::infinity();
  double x_max = std::numeric_limits<double>::infinity();
  double y_min = -std::numeric_limits<double>::infinity();
  double y_max = std::numeric_limits<double>::infinity();
  double mean = 0.5;
  double contrast = 0.35;
  /// Shortest texture wavelength in pixels, as seen from the first camera at
  /// this plane's depth.
  double wavelength_px = 12.0;
  /// 0 keeps the plain sum of sines; larger values sharpen it through tanh.
  double sharpness = 2.0;
};

enum class TrajectoryKind { kStatic, kLinear, kSmooth, kExplicit };

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::kStatic;
  Twist velocity;           ///< per-frame twist (linear)
  Vec6 amplitude = Vec6::Zero();  ///< [t; omega] sine amplitudes (smooth)
  double period = 40.0;     ///< frames per sine period (smooth)
  std::vector<Se3Pose> poses;  ///< world-from-camera (explicit)
};

enum class DegradationKind { kSprite, kGainOffset, kHighlight, kDepthHoles, kDepthNoise };

struct Region {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

struct Degradation {
  DegradationKind kind = DegradationKind::kSprite;
  Region region;
  /// sprite: texture contrast; gain_offset: gain; highlight: peak brightness;
  /// depth_noise: relative sigma.
  double magnitude = 0.0;
  double offset = 0.0;          ///< gain_offset additive term
  Vec2 motion = Vec2::Zero();   ///< sprite / highlight drift in pixels per frame
  double depth = 1.0;           ///< sprite depth at frame 0 (m)
  double depth_rate = 0.0;      ///< sprite depth change per frame (m)
  double flicker = 0.0;         ///< sprite relative brightness alternation
  double wavelength_px = 10.0;  ///< sprite texture wavelength
  int first_frame = 0;
  int last_frame = -1;          ///< inclusive; -1 = to the end
  std::uint64_t seed = 0;

  bool active(int frame) const {
    return frame >= first_frame && (last_frame < 0 || frame <= last_frame);
  }
};

struct SceneSpec {
  Intrinsics intrinsics{160.0, 160.0, 79.5, 59.5, 160, 120};
  int frame_count = 30;
  double fps = 30.0;
  std::uint64_t seed = 0;
  /// Intensity is the mean of supersample^2 rays per pixel so occlusion edges
  /// are area-filtered; depth comes from the pixel-centre ray.
  int supersample = 2;
  std::vector<TexturedPlane> planes;
  TrajectorySpec trajectory;
  std::vector<Degradation> degradations;

  /// Throws kValidation listing every violation.
  void validate() const;
};

/// Parses the key-value scene description used by the CLI.
SceneSpec parse_scene_spec(const KeyValueConfig& config);

struct SyntheticSequence {
  Intrinsics intrinsics;
  std::vector<RgbdFrame> frames;
  GroundTruth truth;
  std::vector<ImageD> true_depth;  ///< geometry before depth degradations
  std::vector<Mask> dynamic;       ///< pixels whose flow is not camera-induced
};

/// World-from-camera poses of the trajectory.
std::vector<Se3Pose> trajectory_poses(const SceneSpec& spec);

/// Renders the undegraded scene then applies every degradation in order.
SyntheticSequence render_sequence(const SceneSpec& spec);

/// Applies one degradation in place (frames, flow and dynamic masks).
void apply_degradation(SyntheticSequence& sequence, const Degradation& degradation);

/// Band-limited sum-of-sines texture sampled on the pixel grid.
ImageD procedural_texture(int width, int height, double wavelength_px, double mean,
                          double contrast, std::uint64_t seed);

}  // namespace cwvo
