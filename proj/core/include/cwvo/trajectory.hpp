#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cwvo/geometry.hpp"

namespace cwvo {

struct StampedPose {
  double timestamp = 0.0;
  Se3Pose pose;  ///< world-from-camera
};

/// Strictly increasing timestamps.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<StampedPose> poses);

  void push_back(double timestamp, const Se3Pose& pose);
  std::size_t size() const noexcept { return poses_.size(); }
  bool empty() const noexcept { return poses_.empty(); }
  const StampedPose& operator[](std::size_t i) const { return poses_[i]; }
  const std::vector<StampedPose>& poses() const noexcept { return poses_; }

 private:
  std::vector<StampedPose> poses_;
};

/// One TUM line: "timestamp tx ty tz qx qy qz qw" (timestamp with 6 decimals,
/// pose fields with 9 significant digits, qw >= 0).
std::string format_tum_line(const StampedPose& pose);
std::string format_tum(const Trajectory& trajectory);
Trajectory parse_tum(const std::string& text, const std::string& origin = "<string>");

void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory);
Trajectory read_trajectory(const std::filesystem::path& path);

inline constexpr double kMaxMatchGap = 0.02;

/// Index pairs (estimated, reference) matched by nearest timestamp.
std::vector<std::pair<std::size_t, std::size_t>> match_timestamps(const Trajectory& estimated,
                                                                  const Trajectory& reference,
                                                                  double max_gap = kMaxMatchGap);

/// Least-squares rigid transform (no scale) mapping `source` onto `target`.
Se3Pose align_rigid(const std::vector<Vec3>& source, const std::vector<Vec3>& target);

/// RMSE of translational residuals after rigid alignment of the estimate.
double ate_rmse(const Trajectory& estimated, const Trajectory& reference);

/// RMSE over i of |trans((Q_i^-1 Q_{i+d})^-1 (P_i^-1 P_{i+d}))| on the matched
/// sequence, P = estimate, Q = reference.
double rpe_trans_rmse(const Trajectory& estimated, const Trajectory& reference, int delta = 1);

}  // namespace cwvo
