#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "cwvo/error.hpp"
#include "cwvo/synth.hpp"
#include "cwvo/tracker.hpp"
#include "test_support.hpp"

using namespace cwvo;
using cwvo::testing::random_pose;
using cwvo::testing::smooth_image;

namespace {

double residual_at(const ImageD& host, const ImageD& target, const Intrinsics& k,
                   const Se3Pose& pose, const SupportPixel& sp) {
  const Vec3 p = pose * backproject(k, Vec2(sp.x, sp.y), sp.depth);
  const Vec2 uv(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy);
  return host(sp.x, sp.y) - bilinear_sample(target, uv).value;
}

bool near_cell_edge(const Vec2& p, double margin) {
  const double fx = p.x() - std::floor(p.x());
  const double fy = p.y() - std::floor(p.y());
  return fx < margin || fx > 1.0 - margin || fy < margin || fy > 1.0 - margin;
}

PixelLinearization make_lin(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  PixelLinearization lin;
  for (int a = 0; a < 6; ++a) lin.jacobian(a) = n(rng);
  lin.residual = 0.01 * n(rng);
  lin.valid = true;
  return lin;
}

Keyframe keyframe_from(const RgbdFrame& frame, int budget = 400) {
  Keyframe kf;
  kf.frame = frame;
  kf.prior = unit_prior(frame.intensity.width(), frame.intensity.height(), frame.index);
  SelectorConfig sc;
  sc.budget = budget;
  kf.support = select_support(frame.intensity, frame.depth, kf.prior.photo, sc);
  kf.pyramid = ImagePyramid(frame.intensity, 4);
  return kf;
}

SyntheticSequence two_frame_scene() {
  SceneSpec spec;
  spec.frame_count = 2;
  spec.seed = 5;
  spec.planes.push_back({});
  spec.planes[0].depth = 2.5;
  spec.trajectory.kind = TrajectoryKind::kLinear;
  Vec6 v;
  v << 0.02, -0.01, 0.015, 0.004, -0.006, 0.003;
  spec.trajectory.velocity = Twist::from_vector(v);
  return render_sequence(spec);
}

}  // namespace

TEST(TrackingConfig, Validation) {
  TrackingConfig c;
  EXPECT_NO_THROW(c.validate());
  c.levels = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.huber = 0.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Jacobian, MatchesCentralDifferences) {
  // 100+ random (pose, pixel) samples on smooth images; every column within
  // 1e-4 relative error of a central difference in the left-perturbation twist.
  const auto start = std::chrono::steady_clock::now();
  const Intrinsics k{70.0, 72.0, 39.7, 29.4, 80, 60};
  const ImageD host = smooth_image(80, 60, 0.0);
  const ImageD target = smooth_image(80, 60, 0.4);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> ux(20, 60), uy(15, 45);
  std::uniform_real_distribution<double> ud(0.8, 4.0);
  const double h = 1e-6;
  int checked = 0;
  int attempts = 0;
  while (checked < 150 && attempts < 10000) {
    ++attempts;
    const Se3Pose pose = random_pose(rng, 0.05, 0.03);
    SupportPixel sp;
    sp.x = ux(rng);
    sp.y = uy(rng);
    sp.depth = ud(rng);
    const PixelLinearization lin = linearize_pixel(host, target, k, pose, sp, 0);
    if (!lin.valid || near_cell_edge(lin.warped, 1e-4)) continue;
    for (int a = 0; a < 6; ++a) {
      Vec6 d = Vec6::Zero();
      d(a) = h;
      const double rp =
          residual_at(host, target, k, se3_exp(Twist::from_vector(d)) * pose, sp);
      const double rm =
          residual_at(host, target, k, se3_exp(Twist::from_vector(-d)) * pose, sp);
      const double fd = (rp - rm) / (2 * h);
      const double rel = std::abs(lin.jacobian(a) - fd) / std::max(std::abs(fd), 1e-6);
      EXPECT_LT(rel, 1e-4) << "column " << a << " sample " << checked;
    }
    EXPECT_NEAR(lin.residual, residual_at(host, target, k, pose, sp), 1e-15);
    ++checked;
  }
  EXPECT_GE(checked, 100);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(secs, 5.0);
}

TEST(Jacobian, InvalidWarps) {
  const Intrinsics k{70.0, 72.0, 39.5, 29.5, 80, 60};
  const ImageD img = smooth_image(80, 60);
  SupportPixel sp{40, 30, 2.0, 0, 0, Vec2::Zero()};
  // behind the camera
  const Se3Pose back(Mat3::Identity(), Vec3(0, 0, -3.0));
  EXPECT_FALSE(linearize_pixel(img, img, k, back, sp, 0).valid);
  // off the image
  const Se3Pose side(Mat3::Identity(), Vec3(5.0, 0, 0));
  EXPECT_FALSE(linearize_pixel(img, img, k, side, sp, 0).valid);
  sp.depth = 0.0;
  EXPECT_FALSE(linearize_pixel(img, img, k, Se3Pose{}, sp, 0).valid);
}

TEST(Jacobian, LevelUsesHalvedCoordinates) {
  const Intrinsics k{70.0, 72.0, 39.5, 29.5, 80, 60};
  const ImagePyramid pyr(smooth_image(80, 60), 3);
  const SupportPixel sp{41, 31, 2.0, 0, 0, Vec2::Zero()};
  const PixelLinearization lin =
      linearize_pixel(pyr.level(2), pyr.level(2), k.at_level(2), Se3Pose{}, sp, 2);
  ASSERT_TRUE(lin.valid);
  EXPECT_EQ(lin.host_x, 41);
  EXPECT_LT((lin.warped - Vec2(10, 7)).norm(), 1e-12);
  EXPECT_NEAR(lin.residual, 0.0, 1e-15);
}

TEST(Accumulate, SinglePixelScaling) {
  // w_g = 0.5, w_p = 1: translational block x0.25, cross block x0.5,
  // rotational block unchanged.
  std::mt19937_64 rng(1);
  PixelLinearization lin = make_lin(rng);
  lin.host_x = 1;
  lin.host_y = 2;
  const WeightMaps w{ImageD(4, 4, 1.0), ImageD(4, 4, 0.5)};
  const NormalEquations plain = accumulate_weighted({&lin, 1}, nullptr, false, 1.0);
  const NormalEquations weighted = accumulate_weighted({&lin, 1}, &w, true, 1.0);
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      const double scale = (a < 3 && b < 3) ? 0.25 : (a < 3 || b < 3) ? 0.5 : 1.0;
      EXPECT_NEAR(weighted.hessian(a, b), scale * plain.hessian(a, b), 1e-15);
    }
    EXPECT_NEAR(weighted.gradient(a), (a < 3 ? 0.5 : 1.0) * plain.gradient(a), 1e-15);
  }
  // Oracle: J^T J for one row.
  const Mat6 jtj = lin.jacobian.transpose() * lin.jacobian;
  EXPECT_LT((plain.hessian - jtj).norm(), 1e-14);
}

TEST(Accumulate, PhotometricWeightScalesResidualAndAllColumns) {
  std::mt19937_64 rng(2);
  PixelLinearization lin = make_lin(rng);
  const WeightMaps w{ImageD(2, 2, 0.5), ImageD(2, 2, 1.0)};
  const NormalEquations plain = accumulate_weighted({&lin, 1}, nullptr, false, 1.0);
  const NormalEquations weighted = accumulate_weighted({&lin, 1}, &w, true, 1.0);
  EXPECT_LT((weighted.hessian - 0.25 * plain.hessian).norm(), 1e-15);
  EXPECT_LT((weighted.gradient - 0.25 * plain.gradient).norm(), 1e-15);
}

TEST(Accumulate, DecouplingRotationalBlockBitwise) {
  std::mt19937_64 rng(3);
  for (int count : {1, 1000}) {
    std::vector<PixelLinearization> lins;
    std::uniform_int_distribution<int> ux(0, 39), uy(0, 29);
    for (int i = 0; i < count; ++i) {
      lins.push_back(make_lin(rng));
      lins.back().host_x = ux(rng);
      lins.back().host_y = uy(rng);
    }
    const WeightMaps base{ImageD(40, 30, 1.0), ImageD(40, 30, 1.0)};
    const NormalEquations ref = accumulate_weighted(lins, &base, true, 9.0 / 255.0);
    for (int trial = 0; trial < 5; ++trial) {
      WeightMaps w = base;
      for (double& v : w.geo.pixels()) v = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
      const NormalEquations ne = accumulate_weighted(lins, &w, true, 9.0 / 255.0);
      for (int a = 3; a < 6; ++a) {
        for (int b = 3; b < 6; ++b) EXPECT_EQ(ne.hessian(a, b), ref.hessian(a, b));
        EXPECT_EQ(ne.gradient(a), ref.gradient(a));
      }
      EXPECT_EQ(ne.energy, ref.energy);
    }
  }
}

TEST(Accumulate, HuberDownweightsOutliers) {
  PixelLinearization lin;
  lin.valid = true;
  lin.jacobian << 1, 0, 0, 0, 0, 0;
  lin.residual = 0.5;
  const double delta = 0.1;
  const NormalEquations ne = accumulate_weighted({&lin, 1}, nullptr, false, delta);
  EXPECT_NEAR(ne.hessian(0, 0), delta / 0.5, 1e-15);
  EXPECT_NEAR(ne.gradient(0), delta, 1e-15);
  EXPECT_NEAR(ne.energy, delta * (0.5 - 0.5 * delta), 1e-15);
}

TEST(Accumulate, SkipsInvalidAndCounts) {
  std::mt19937_64 rng(4);
  std::vector<PixelLinearization> lins{make_lin(rng), make_lin(rng), PixelLinearization{}};
  const NormalEquations ne = accumulate_weighted(lins, nullptr, false, 1.0);
  EXPECT_EQ(ne.valid_count, 2);
  EXPECT_EQ(ne.total_count, 3);
  EXPECT_NO_THROW(require_valid_fraction(ne, 0.5));
  try {
    require_valid_fraction(ne, 0.7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTrackingDegenerate);
  }
}

TEST(Tracker, RecoversRelativePose) {
  const SyntheticSequence seq = two_frame_scene();
  const Keyframe kf = keyframe_from(seq.frames[0]);
  ASSERT_GT(kf.support.size(), 100u);
  const Se3Pose truth = seq.truth.poses[1].inverse() * seq.truth.poses[0];
  const ImagePyramid target(seq.frames[1].intensity, 4);
  const TrackResult r = track_frame(kf, target, Se3Pose::identity(), nullptr, TrackingConfig{});
  EXPECT_LT(se3_log(truth.inverse() * r.pose).vector().norm(), 2e-3);
  ASSERT_EQ(r.levels.size(), 4u);
  EXPECT_EQ(r.levels.back().level, 0);
  for (const auto& l : r.levels) {
    EXPECT_LE(l.final_energy, l.initial_energy);
    for (std::size_t i = 1; i < l.accepted_energies.size(); ++i) {
      EXPECT_LE(l.accepted_energies[i], l.accepted_energies[i - 1]);
    }
    EXPECT_LE(l.iterations, TrackingConfig{}.max_iterations);
  }
}

TEST(Tracker, DecoupledOnlyAtFinestLevel) {
  const SyntheticSequence seq = two_frame_scene();
  const Keyframe kf = keyframe_from(seq.frames[0]);
  const WeightMaps w = weights_from_prior(kf.prior);
  const TrackResult r =
      track_frame(kf, ImagePyramid(seq.frames[1].intensity, 4), Se3Pose{}, &w, TrackingConfig{});
  for (const auto& l : r.levels) EXPECT_EQ(l.decoupled, l.level == 0);
}

TEST(Tracker, RecordsNormalEquationsOnRequest) {
  const SyntheticSequence seq = two_frame_scene();
  const Keyframe kf = keyframe_from(seq.frames[0]);
  TrackingConfig c;
  c.record_normal_equations = true;
  const TrackResult r =
      track_frame(kf, ImagePyramid(seq.frames[1].intensity, 4), Se3Pose{}, nullptr, c);
  for (const auto& l : r.levels) {
    EXPECT_EQ(l.normal_equations.size(), l.accepted_energies.size());
  }
}

TEST(Tracker, DegenerateWhenSupportLeavesImage) {
  const SyntheticSequence seq = two_frame_scene();
  const Keyframe kf = keyframe_from(seq.frames[0]);
  const Se3Pose far(Mat3::Identity(), Vec3(50.0, 0.0, 0.0));
  try {
    (void)track_frame(kf, ImagePyramid(seq.frames[1].intensity, 4), far, nullptr, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTrackingDegenerate);
  }
  Keyframe empty = kf;
  empty.support.clear();
  EXPECT_THROW(
      (void)track_frame(empty, ImagePyramid(seq.frames[1].intensity, 4), Se3Pose{}, nullptr, {}),
      Error);
}

TEST(Tracker, PoseStaysOnManifold) {
  const SyntheticSequence seq = two_frame_scene();
  const Keyframe kf = keyframe_from(seq.frames[0]);
  const TrackResult r =
      track_frame(kf, ImagePyramid(seq.frames[1].intensity, 4), Se3Pose{}, nullptr, {});
  const Mat3& R = r.pose.rotation();
  EXPECT_LT((R * R.transpose() - Mat3::Identity()).norm(), 1e-14);
}
