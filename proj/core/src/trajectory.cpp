#include "cwvo/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/SVD>

#include "cwvo/config.hpp"

namespace cwvo {

Trajectory::Trajectory(std::vector<StampedPose> poses) {
  for (const auto& p : poses) push_back(p.timestamp, p.pose);
}

void Trajectory::push_back(double timestamp, const Se3Pose& pose) {
  if (!std::isfinite(timestamp) || !pose.is_finite()) {
    throw Error(ErrorKind::kInvalidArgument, "trajectory: non-finite pose or timestamp");
  }
  if (!poses_.empty() && !(timestamp > poses_.back().timestamp)) {
    throw Error(ErrorKind::kInvalidArgument, "trajectory: timestamps must strictly increase");
  }
  poses_.push_back({timestamp, pose});
}

std::string format_tum_line(const StampedPose& sp) {
  Eigen::Quaterniond q(sp.pose.rotation());
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  const Vec3& t = sp.pose.translation();
  // -0 prints as "-0"; fold it so identity reads "0 0 0 0 0 0 1".
  const auto z = [](double v) { return v == 0.0 ? 0.0 : v; };
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.6f %.9g %.9g %.9g %.9g %.9g %.9g %.9g", sp.timestamp,
                z(t.x()), z(t.y()), z(t.z()), z(q.x()), z(q.y()), z(q.z()), z(q.w()));
  return buf;
}

std::string format_tum(const Trajectory& trajectory) {
  std::string out;
  for (const auto& p : trajectory.poses()) out += format_tum_line(p) + "\n";
  return out;
}

Trajectory parse_tum(const std::string& text, const std::string& origin) {
  Trajectory traj;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<double> v;
    std::string tok;
    bool ok = true;
    while (fields >> tok) {
      double d = 0.0;
      if (!parse_number(tok, d) || tok.find('/') != std::string::npos || !std::isfinite(d)) {
        ok = false;
        break;
      }
      v.push_back(d);
    }
    const std::string where = origin + ":" + std::to_string(number);
    if (!ok || v.size() != 8) {
      throw Error(ErrorKind::kParse, where + ": expected 'timestamp tx ty tz qx qy qz qw'");
    }
    Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
    if (q.norm() < 1e-6) throw Error(ErrorKind::kParse, where + ": zero quaternion");
    q.normalize();
    try {
      traj.push_back(v[0], Se3Pose(q.toRotationMatrix(), Vec3(v[1], v[2], v[3])));
    } catch (const Error& e) {
      throw Error(ErrorKind::kParse, where + ": " + e.what());
    }
  }
  return traj;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  f << format_tum(trajectory);
  if (!f) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_tum(ss.str(), path.string());
}

std::vector<std::pair<std::size_t, std::size_t>> match_timestamps(const Trajectory& estimated,
                                                                  const Trajectory& reference,
                                                                  double max_gap) {
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  const auto& ref = reference.poses();
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const double t = estimated[i].timestamp;
    const auto it = std::lower_bound(ref.begin(), ref.end(), t,
                                     [](const StampedPose& p, double v) { return p.timestamp < v; });
    std::size_t best = ref.size();
    double gap = max_gap;
    for (auto c : {it, it == ref.begin() ? ref.end() : std::prev(it)}) {
      if (c == ref.end()) continue;
      const double g = std::abs(c->timestamp - t);
      if (g <= gap) {
        gap = g;
        best = static_cast<std::size_t>(c - ref.begin());
      }
    }
    if (best != ref.size()) matches.emplace_back(i, best);
  }
  return matches;
}

Se3Pose align_rigid(const std::vector<Vec3>& source, const std::vector<Vec3>& target) {
  if (source.size() != target.size() || source.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "align_rigid: point sets differ in size");
  }
  const double n = static_cast<double>(source.size());
  Vec3 mu_s = Vec3::Zero();
  Vec3 mu_t = Vec3::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    mu_s += source[i];
    mu_t += target[i];
  }
  mu_s /= n;
  mu_t /= n;
  Mat3 cov = Mat3::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    cov += (target[i] - mu_t) * (source[i] - mu_s).transpose();
  }
  const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 s = Mat3::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) s(2, 2) = -1.0;
  const Mat3 r = svd.matrixU() * s * svd.matrixV().transpose();
  return {r, mu_t - r * mu_s};
}

double ate_rmse(const Trajectory& estimated, const Trajectory& reference) {
  const auto matches = match_timestamps(estimated, reference);
  if (matches.size() < 2) {
    throw Error(ErrorKind::kInsufficientOverlap,
                "ATE needs at least 2 matched poses, found " + std::to_string(matches.size()));
  }
  std::vector<Vec3> est;
  std::vector<Vec3> ref;
  for (auto [e, r] : matches) {
    est.push_back(estimated[e].pose.translation());
    ref.push_back(reference[r].pose.translation());
  }
  const Se3Pose align = align_rigid(est, ref);
  double sum = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) sum += (align * est[i] - ref[i]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(est.size()));
}

double rpe_trans_rmse(const Trajectory& estimated, const Trajectory& reference, int delta) {
  if (delta < 1) throw Error(ErrorKind::kInvalidArgument, "RPE delta must be >= 1");
  const auto matches = match_timestamps(estimated, reference);
  const auto d = static_cast<std::size_t>(delta);
  if (matches.size() <= d) {
    throw Error(ErrorKind::kInsufficientOverlap,
                "RPE needs more than " + std::to_string(delta) + " matched poses");
  }
  double sum = 0.0;
  const std::size_t count = matches.size() - d;
  for (std::size_t i = 0; i < count; ++i) {
    const Se3Pose& p0 = estimated[matches[i].first].pose;
    const Se3Pose& p1 = estimated[matches[i + d].first].pose;
    const Se3Pose& q0 = reference[matches[i].second].pose;
    const Se3Pose& q1 = reference[matches[i + d].second].pose;
    const Se3Pose err = (q0.inverse() * q1).inverse() * (p0.inverse() * p1);
    sum += err.translation().squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(count));
}

}  // namespace cwvo
