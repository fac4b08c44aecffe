#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "cwvo/geometry.hpp"
#include "cwvo/image.hpp"

namespace cwvo::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("cwvo_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline ImageD random_image(int w, int h, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ImageD img(w, h);
  for (double& v : img.pixels()) v = u(rng);
  return img;
}

/// Smooth analytic image, handy when derivatives must be well behaved.
inline ImageD smooth_image(int w, int h, double phase = 0.0) {
  ImageD img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img(x, y) = 0.5 + 0.2 * std::sin(0.31 * x + phase) * std::cos(0.23 * y) +
                  0.1 * std::sin(0.11 * x + 0.17 * y + 2.0 * phase);
    }
  }
  return img;
}

inline Se3Pose random_pose(std::mt19937_64& rng, double trans, double rot) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec6 v;
  for (int i = 0; i < 3; ++i) v(i) = trans * n(rng);
  for (int i = 3; i < 6; ++i) v(i) = rot * n(rng);
  return se3_exp(Twist::from_vector(v));
}

inline Intrinsics small_intrinsics(int w = 64, int h = 48) {
  return {60.0, 62.0, (w - 1) / 2.0 + 0.3, (h - 1) / 2.0 - 0.2, w, h};
}

}  // namespace cwvo::testing
