#include "cwvo/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace cwvo {
namespace {

double huber_weight(double r, double delta) {
  const double a = std::abs(r);
  return a <= delta ? 1.0 : delta / a;
}

double huber_energy(double r, double delta) {
  const double a = std::abs(r);
  return a <= delta ? 0.5 * r * r : delta * (a - 0.5 * delta);
}

NormalEquations linearize_and_accumulate(const Keyframe& host, const ImagePyramid& target,
                                         const Se3Pose& pose, int level,
                                         const WeightMaps* weights, bool decoupled,
                                         const TrackingConfig& config) {
  const Intrinsics k = host.frame.intrinsics.at_level(level);
  const ImageD& host_image = host.pyramid.level(level);
  const ImageD& target_image = target.level(level);
  std::vector<PixelLinearization> lins;
  lins.reserve(host.support.size());
  for (const SupportPixel& sp : host.support) {
    lins.push_back(linearize_pixel(host_image, target_image, k, pose, sp, level, config.z_min));
  }
  return accumulate_weighted(lins, weights, decoupled, config.huber);
}

void check_conditioning(const Mat6& h, double max_condition) {
  const Eigen::SelfAdjointEigenSolver<Mat6> eig(h, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(5);
  if (!(lo > 0.0) || hi / lo > max_condition) {
    throw Error(ErrorKind::kDegenerateGeometry,
                "normal equations ill-conditioned (eigenvalues " + std::to_string(lo) + ", " +
                    std::to_string(hi) + ")");
  }
}

}  // namespace

void TrackingConfig::validate() const {
  if (levels < 1) throw Error(ErrorKind::kInvalidArgument, "tracker: levels must be >= 1");
  if (max_iterations < 1) throw Error(ErrorKind::kInvalidArgument, "tracker: max_iterations < 1");
  if (!(convergence > 0.0) || !(huber > 0.0) || !(min_valid_fraction > 0.0) ||
      !(max_condition > 0.0) || !(z_min > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "tracker: thresholds must be positive");
  }
}

PixelLinearization linearize_pixel(const ImageD& host, const ImageD& target,
                                   const Intrinsics& k, const Se3Pose& pose,
                                   const SupportPixel& pixel, int level, double z_min) {
  PixelLinearization lin;
  lin.host_x = pixel.x;
  lin.host_y = pixel.y;
  const int hx = pixel.x >> level;
  const int hy = pixel.y >> level;
  if (!host.contains(hx, hy) || !is_valid_depth(pixel.depth)) return lin;

  const Vec3 warped_point = pose * backproject(k, Vec2(hx, hy), pixel.depth);
  const auto proj = try_project(k, warped_point, z_min);
  if (!proj) return lin;
  const auto sample = try_bilinear_sample(target, proj->pixel);
  if (!sample) return lin;

  const double rho = 1.0 / warped_point.z();
  const double x = warped_point.x() * rho;
  const double y = warped_point.y() * rho;
  const double gx = sample->dx * k.fx;
  const double gy = sample->dy * k.fy;
  const double gz = -(gx * x + gy * y);

  lin.residual = host(hx, hy) - sample->value;
  lin.gradient = {sample->dx, sample->dy};
  lin.inverse_depth = rho;
  lin.warped = proj->pixel;
  // Translational block carries the inverse depth; the rotational one does not.
  lin.jacobian << -rho * gx, -rho * gy, -rho * gz,
                  gy - gz * y, gz * x - gx, gx * y - gy * x;
  lin.valid = true;
  return lin;
}

NormalEquations accumulate_weighted(std::span<const PixelLinearization> lins,
                                    const WeightMaps* weights, bool apply_decoupled,
                                    double huber) {
  const bool weighted = apply_decoupled && weights != nullptr;
  NormalEquations ne;
  ne.total_count = static_cast<int>(lins.size());
  for (const PixelLinearization& lin : lins) {
    if (!lin.valid) continue;
    double wp = 1.0;
    double wg = 1.0;
    if (weighted) {
      wp = weights->photo(lin.host_x, lin.host_y);
      wg = weights->geo(lin.host_x, lin.host_y);
    }
    const double wt = wp * wg;
    Jacobian j;
    j << wt * lin.jacobian(0), wt * lin.jacobian(1), wt * lin.jacobian(2),
         wp * lin.jacobian(3), wp * lin.jacobian(4), wp * lin.jacobian(5);
    const double r = wp * lin.residual;
    const double h = huber_weight(r, huber);
    for (int a = 0; a < 6; ++a) {
      const double hja = h * j(a);
      for (int c = 0; c <= a; ++c) ne.hessian(a, c) += hja * j(c);
      ne.gradient(a) += hja * r;
    }
    ne.energy += huber_energy(r, huber);
    ++ne.valid_count;
  }
  for (int a = 0; a < 6; ++a) {
    for (int c = a + 1; c < 6; ++c) ne.hessian(a, c) = ne.hessian(c, a);
  }
  return ne;
}

void require_valid_fraction(const NormalEquations& ne, double min_fraction) {
  if (ne.total_count == 0 ||
      static_cast<double>(ne.valid_count) < min_fraction * static_cast<double>(ne.total_count)) {
    throw Error(ErrorKind::kTrackingDegenerate,
                std::to_string(ne.valid_count) + " of " + std::to_string(ne.total_count) +
                    " support pixels project validly");
  }
}

Se3Pose solve_level(const Keyframe& host, const ImagePyramid& target, const Se3Pose& init,
                    int level, const WeightMaps* weights, const TrackingConfig& config,
                    LevelReport* report) {
  const bool decoupled = level == 0 && weights != nullptr;
  LevelReport local;
  LevelReport& rep = report ? *report : local;
  rep = LevelReport{};
  rep.level = level;
  rep.decoupled = decoupled;

  const auto evaluate = [&](const Se3Pose& pose) {
    return linearize_and_accumulate(host, target, pose, level, weights, decoupled, config);
  };

  Se3Pose pose = init;
  NormalEquations ne = evaluate(pose);
  require_valid_fraction(ne, config.min_valid_fraction);
  rep.initial_energy = ne.mean_energy();
  rep.accepted_energies.push_back(ne.mean_energy());
  if (config.record_normal_equations) rep.normal_equations.push_back(ne);

  for (int it = 0; it < config.max_iterations; ++it) {
    ++rep.iterations;
    check_conditioning(ne.hessian, config.max_condition);
    const Vec6 step = -ne.hessian.ldlt().solve(ne.gradient);
    if (!step.allFinite()) {
      throw Error(ErrorKind::kDegenerateGeometry, "non-finite Gauss-Newton step");
    }

    bool accepted = false;
    Vec6 applied = step;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const Se3Pose candidate = (se3_exp(Twist::from_vector(applied)) * pose).normalized();
      NormalEquations next;
      try {
        next = evaluate(candidate);
        require_valid_fraction(next, config.min_valid_fraction);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kTrackingDegenerate) throw;
        applied *= 0.5;
        continue;
      }
      if (next.mean_energy() <= ne.mean_energy()) {
        pose = candidate;
        ne = std::move(next);
        accepted = true;
      } else {
        applied *= 0.5;
      }
    }
    if (!accepted) break;
    rep.accepted_energies.push_back(ne.mean_energy());
    if (config.record_normal_equations) rep.normal_equations.push_back(ne);
    if (applied.norm() < config.convergence) break;
  }
  rep.final_energy = ne.mean_energy();
  rep.valid_fraction =
      ne.total_count > 0 ? static_cast<double>(ne.valid_count) / ne.total_count : 0.0;
  return pose;
}

TrackResult track_frame(const Keyframe& host, const ImagePyramid& target, const Se3Pose& init,
                        const WeightMaps* weights, const TrackingConfig& config) {
  config.validate();
  if (host.support.empty()) {
    throw Error(ErrorKind::kTrackingDegenerate, "host keyframe has no support pixels");
  }
  const int levels = std::min({config.levels, host.pyramid.num_levels(), target.num_levels()});
  TrackResult result;
  result.pose = init;
  for (int level = levels - 1; level >= 0; --level) {
    LevelReport rep;
    result.pose = solve_level(host, target, result.pose, level, weights, config, &rep);
    result.levels.push_back(std::move(rep));
  }
  return result;
}

}  // namespace cwvo
