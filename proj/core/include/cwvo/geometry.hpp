#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "cwvo/image.hpp"

namespace cwvo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// se(3) increment, translation first: [t; omega].
struct Twist {
  Vec3 translation = Vec3::Zero();
  Vec3 rotation = Vec3::Zero();

  static Twist from_vector(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }
  Vec6 vector() const {
    Vec6 v;
    v << translation, rotation;
    return v;
  }
};

/// Rigid transform x' = R x + t.
class Se3Pose {
 public:
  Se3Pose() = default;
  Se3Pose(const Mat3& rotation, const Vec3& translation)
      : rotation_(rotation), translation_(translation) {}

  static Se3Pose identity() { return {}; }
  static Se3Pose from_matrix(const Mat4& m) {
    return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
  }

  const Mat3& rotation() const noexcept { return rotation_; }
  const Vec3& translation() const noexcept { return translation_; }
  Mat4 matrix() const;

  Se3Pose inverse() const;
  Se3Pose operator*(const Se3Pose& rhs) const;
  /// Row by row, left to right, so the rounding does not depend on how Eigen
  /// vectorises the product.
  Vec3 operator*(const Vec3& point) const {
    const Mat3& r = rotation_;
    const Vec3& t = translation_;
    return {r(0, 0) * point.x() + r(0, 1) * point.y() + r(0, 2) * point.z() + t.x(),
            r(1, 0) * point.x() + r(1, 1) * point.y() + r(1, 2) * point.z() + t.y(),
            r(2, 0) * point.x() + r(2, 1) * point.y() + r(2, 2) * point.z() + t.z()};
  }

  bool is_finite() const { return rotation_.allFinite() && translation_.allFinite(); }
  /// Projects the rotation back onto SO(3). Long pose chains that invert by
  /// transposition otherwise let round-off compound.
  Se3Pose normalized() const;

  friend bool operator==(const Se3Pose&, const Se3Pose&) = default;

 private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 translation_ = Vec3::Zero();
};

Mat3 hat(const Vec3& w);

Se3Pose se3_exp(const Twist& xi);
/// Throws kNearSingular when the rotation angle is within 1e-6 of pi.
Twist se3_log(const Se3Pose& pose);

/// Rotation angle of a pose in radians.
double rotation_angle(const Se3Pose& pose);

struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;

  /// Intrinsics for pyramid level `level` under 2x2 mean pooling (pixel centres
  /// at integer coordinates). Not validated: cx may drift just below zero.
  Intrinsics at_level(int level) const;

  friend bool operator==(const Intrinsics&, const Intrinsics&) = default;
};

inline constexpr double kDefaultZMin = 1e-4;

struct Projection {
  Vec2 pixel;
  double depth = 0.0;
};

Vec3 backproject(const Intrinsics& k, const Vec2& pixel, double depth);

Projection project(const Intrinsics& k, const Vec3& point, double z_min = kDefaultZMin);
std::optional<Projection> try_project(const Intrinsics& k, const Vec3& point,
                                      double z_min = kDefaultZMin) noexcept;

/// Pixel in the target view and depth of the transformed point.
Projection warp_point(const Se3Pose& relative, const Intrinsics& k, const Vec2& pixel,
                      double depth, double z_min = kDefaultZMin);

struct Sample {
  double value = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

/// Bilinear lookup with the derivative of the blended surface. Throws
/// kSampleOutOfBounds outside [0, w-1] x [0, h-1].
Sample bilinear_sample(const ImageD& image, const Vec2& p);
/// Same as bilinear_sample but returns nullopt instead of throwing.
std::optional<Sample> try_bilinear_sample(const ImageD& image, const Vec2& p) noexcept;

/// 2x2 mean pooling; odd trailing rows/columns average the parents that exist.
ImageD downsample_mean(const ImageD& image);

class ImagePyramid {
 public:
  ImagePyramid() = default;
  ImagePyramid(const ImageD& base, int levels);

  int num_levels() const noexcept { return static_cast<int>(levels_.size()); }
  const ImageD& level(int l) const { return levels_.at(static_cast<std::size_t>(l)); }

 private:
  std::vector<ImageD> levels_;
};

/// Luma conversion used for colour input (ITU-R BT.601 weights).
inline double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

}  // namespace cwvo
