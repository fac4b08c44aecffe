#include "cwvo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cwvo {
namespace {

constexpr double kSmallAngle = 1e-8;
// Below this angle the closed-form coefficients lose most of their digits to
// cancellation; the truncated series is exact to double precision there.
constexpr double kSeriesAngle = 1e-2;
constexpr double kLogSingularMargin = 1e-6;

Vec3 vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

}  // namespace

Mat4 Se3Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Se3Pose Se3Pose::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return {rt, -(rt * translation_)};
}

Se3Pose Se3Pose::operator*(const Se3Pose& rhs) const {
  return {rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_};
}

Se3Pose Se3Pose::normalized() const {
  return {Eigen::Quaterniond(rotation_).normalized().toRotationMatrix(), translation_};
}

Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

Se3Pose se3_exp(const Twist& xi) {
  if (!xi.translation.allFinite() || !xi.rotation.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "se3_exp: non-finite twist");
  }
  const double theta = xi.rotation.norm();
  const Mat3 w = hat(xi.rotation);
  const Mat3 w2 = w * w;
  const double t2 = theta * theta;
  double a, b, c;
  if (theta < kSeriesAngle) {
    a = 1.0 - t2 / 6.0 * (1.0 - t2 / 20.0);
    b = 0.5 - t2 / 24.0 * (1.0 - t2 / 30.0);
    c = 1.0 / 6.0 - t2 / 120.0 * (1.0 - t2 / 42.0);
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / t2;
    c = (theta - std::sin(theta)) / (t2 * theta);
  }
  const Mat3 r = Mat3::Identity() + a * w + b * w2;
  const Mat3 v = Mat3::Identity() + b * w + c * w2;
  return {r, v * xi.translation};
}

double rotation_angle(const Se3Pose& pose) {
  const Mat3& r = pose.rotation();
  const double s = 0.5 * vee(r - r.transpose()).norm();
  const double c = 0.5 * (r.trace() - 1.0);
  return std::atan2(s, c);
}

Twist se3_log(const Se3Pose& pose) {
  const Mat3& r = pose.rotation();
  const double theta = rotation_angle(pose);
  if (theta > std::numbers::pi - kLogSingularMargin) {
    throw Error(ErrorKind::kNearSingular,
                "se3_log: rotation angle " + std::to_string(theta) + " too close to pi");
  }
  const Vec3 axis_sin = 0.5 * vee(r - r.transpose());
  Vec3 omega;
  if (theta < kSmallAngle) {
    omega = axis_sin;
  } else {
    omega = (theta / std::sin(theta)) * axis_sin;
  }
  const Mat3 w = hat(omega);
  double coeff;
  if (theta < kSeriesAngle) {
    const double t2 = theta * theta;
    coeff = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  } else {
    const double half_cot = theta * std::sin(theta) / (2.0 * (1.0 - std::cos(theta)));
    coeff = (1.0 - half_cot) / (theta * theta);
  }
  const Mat3 v_inv = Mat3::Identity() - 0.5 * w + coeff * (w * w);
  return {v_inv * pose.translation(), omega};
}

void Intrinsics::validate() const {
  const bool finite = std::isfinite(fx) && std::isfinite(fy) && std::isfinite(cx) &&
                      std::isfinite(cy);
  if (!finite || fx <= 0.0 || fy <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "intrinsics: focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "intrinsics: image size must be positive");
  }
  if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height) {
    throw Error(ErrorKind::kInvalidArgument, "intrinsics: principal point outside image");
  }
}

Intrinsics Intrinsics::at_level(int level) const {
  if (level < 0) throw Error(ErrorKind::kInvalidArgument, "negative pyramid level");
  Intrinsics k = *this;
  for (int l = 0; l < level; ++l) {
    k.fx *= 0.5;
    k.fy *= 0.5;
    k.cx = (k.cx + 0.5) * 0.5 - 0.5;
    k.cy = (k.cy + 0.5) * 0.5 - 0.5;
    k.width = (k.width + 1) / 2;
    k.height = (k.height + 1) / 2;
  }
  return k;
}

Vec3 backproject(const Intrinsics& k, const Vec2& pixel, double depth) {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw Error(ErrorKind::kInvalidDepth, "backproject: depth must be positive and finite");
  }
  return {(pixel.x() - k.cx) / k.fx * depth, (pixel.y() - k.cy) / k.fy * depth, depth};
}

std::optional<Projection> try_project(const Intrinsics& k, const Vec3& point,
                                      double z_min) noexcept {
  const double z = point.z();
  if (!(z > z_min) || !point.allFinite()) return std::nullopt;
  return Projection{{k.fx * point.x() / z + k.cx, k.fy * point.y() / z + k.cy}, z};
}

Projection project(const Intrinsics& k, const Vec3& point, double z_min) {
  auto p = try_project(k, point, z_min);
  if (!p) throw Error(ErrorKind::kBehindCamera, "project: point at or behind z_min");
  return *p;
}

Projection warp_point(const Se3Pose& relative, const Intrinsics& k, const Vec2& pixel,
                      double depth, double z_min) {
  return project(k, relative * backproject(k, pixel, depth), z_min);
}

std::optional<Sample> try_bilinear_sample(const ImageD& image, const Vec2& p) noexcept {
  const int w = image.width();
  const int h = image.height();
  const double x = p.x();
  const double y = p.y();
  if (w == 0 || h == 0 || !(x >= 0.0) || !(y >= 0.0) || !(x <= w - 1) || !(y <= h - 1)) {
    return std::nullopt;
  }
  const int x0 = std::min(static_cast<int>(x), std::max(w - 2, 0));
  const int y0 = std::min(static_cast<int>(y), std::max(h - 2, 0));
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double ax = x - x0;
  const double ay = y - y0;
  const double i00 = image(x0, y0);
  const double i10 = image(x1, y0);
  const double i01 = image(x0, y1);
  const double i11 = image(x1, y1);
  Sample s;
  s.value = (1.0 - ay) * ((1.0 - ax) * i00 + ax * i10) + ay * ((1.0 - ax) * i01 + ax * i11);
  s.dx = (1.0 - ay) * (i10 - i00) + ay * (i11 - i01);
  s.dy = (1.0 - ax) * (i01 - i00) + ax * (i11 - i10);
  return s;
}

Sample bilinear_sample(const ImageD& image, const Vec2& p) {
  auto s = try_bilinear_sample(image, p);
  if (!s) throw Error(ErrorKind::kSampleOutOfBounds, "bilinear_sample outside image");
  return *s;
}

ImageD downsample_mean(const ImageD& image) {
  const int w = (image.width() + 1) / 2;
  const int h = (image.height() + 1) / 2;
  ImageD out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0;
      int count = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const int sx = 2 * x + dx;
          const int sy = 2 * y + dy;
          if (image.contains(sx, sy)) {
            sum += image(sx, sy);
            ++count;
          }
        }
      }
      out(x, y) = sum / count;
    }
  }
  return out;
}

ImagePyramid::ImagePyramid(const ImageD& base, int levels) {
  if (levels < 1) throw Error(ErrorKind::kInvalidArgument, "pyramid needs at least one level");
  levels_.reserve(static_cast<std::size_t>(levels));
  levels_.push_back(base);
  for (int l = 1; l < levels; ++l) levels_.push_back(downsample_mean(levels_.back()));
}

}  // namespace cwvo
