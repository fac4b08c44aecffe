#include "cwvo/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "cwvo/error.hpp"

namespace cwvo {
namespace {

QualityMap unit_quality(int width, int height, Branch branch) {
  return {ImageD(width, height, 1.0), branch};
}

std::uint64_t selector_seed(std::uint64_t seed, int keyframe_index) {
  return seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(keyframe_index + 1));
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

}  // namespace

std::string to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::kBaseline: return "baseline";
    case AblationMode::kSelect: return "select";
    case AblationMode::kFull: return "full";
  }
  return "?";
}

AblationMode parse_ablation_mode(const std::string& name) {
  if (name == "baseline") return AblationMode::kBaseline;
  if (name == "select") return AblationMode::kSelect;
  if (name == "full") return AblationMode::kFull;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown mode '" + name + "' (expected baseline, select or full)");
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kKeyframe: return "keyframe";
    case EventKind::kSupportSelected: return "support-selected";
    case EventKind::kPriorFinalized: return "prior-finalized";
    case EventKind::kEvicted: return "evicted";
    case EventKind::kTrackingFallback: return "tracking-fallback";
    case EventKind::kProviderFallback: return "provider-fallback";
  }
  return "?";
}

PipelineConfig PipelineConfig::from_config(const KeyValueConfig& c) {
  c.reject_unknown({"provider", "mode", "seed", "oracle.log_floor", "oracle.noise_sigma",
                    "tracker.levels", "tracker.max_iterations", "tracker.convergence",
                    "tracker.huber", "tracker.min_valid_fraction", "tracker.max_condition",
                    "tracker.z_min", "selector.block_size", "selector.cell_size",
                    "selector.border", "selector.gradient_offset", "selector.min_threshold",
                    "selector.budget", "keyframe.max_flow", "keyframe.max_translation",
                    "keyframe.max_rotation_deg", "keyframe.min_valid_fraction", "window.size"});
  PipelineConfig p;
  p.provider = c.get_string("provider", p.provider);
  p.mode = parse_ablation_mode(c.get_string("mode", to_string(p.mode)));
  const long long seed = c.get_int("seed", 0);
  if (seed < 0) throw Error(ErrorKind::kValidation, "seed must be non-negative");
  p.seed = static_cast<std::uint64_t>(seed);
  p.oracle.log_floor = c.get_double("oracle.log_floor", p.oracle.log_floor);
  p.oracle.noise_sigma = c.get_double("oracle.noise_sigma", p.oracle.noise_sigma);
  p.oracle.seed = p.seed;

  auto& t = p.tracker;
  t.levels = static_cast<int>(c.get_int("tracker.levels", t.levels));
  t.max_iterations = static_cast<int>(c.get_int("tracker.max_iterations", t.max_iterations));
  t.convergence = c.get_double("tracker.convergence", t.convergence);
  t.huber = c.get_double("tracker.huber", t.huber);
  t.min_valid_fraction = c.get_double("tracker.min_valid_fraction", t.min_valid_fraction);
  t.max_condition = c.get_double("tracker.max_condition", t.max_condition);
  t.z_min = c.get_double("tracker.z_min", t.z_min);

  auto& s = p.selector;
  s.block_size = static_cast<int>(c.get_int("selector.block_size", s.block_size));
  s.cell_size = static_cast<int>(c.get_int("selector.cell_size", s.cell_size));
  s.border = static_cast<int>(c.get_int("selector.border", s.border));
  s.gradient_offset = c.get_double("selector.gradient_offset", s.gradient_offset);
  s.min_threshold = c.get_double("selector.min_threshold", s.min_threshold);
  s.budget = static_cast<int>(c.get_int("selector.budget", s.budget));

  auto& k = p.keyframe;
  k.max_flow_px = c.get_double("keyframe.max_flow", k.max_flow_px);
  k.max_translation = c.get_double("keyframe.max_translation", k.max_translation);
  k.max_rotation_deg = c.get_double("keyframe.max_rotation_deg", k.max_rotation_deg);
  k.min_valid_fraction = c.get_double("keyframe.min_valid_fraction", k.min_valid_fraction);
  p.window_size = static_cast<int>(c.get_int("window.size", p.window_size));
  p.validate();
  return p;
}

void PipelineConfig::validate() const {
  try {
    tracker.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kValidation, e.what());
  }
  if (window_size < 1) throw Error(ErrorKind::kValidation, "window.size must be >= 1");
  if (selector.block_size < 1 || selector.cell_size < 1 || selector.border < 1 ||
      selector.budget < 1) {
    throw Error(ErrorKind::kValidation, "selector sizes must be positive");
  }
  if (!(oracle.log_floor > 0.0) || !(oracle.noise_sigma >= 0.0)) {
    throw Error(ErrorKind::kValidation, "oracle.log_floor must be > 0 and noise_sigma >= 0");
  }
  if (!(keyframe.max_flow_px > 0.0) || !(keyframe.max_translation > 0.0) ||
      !(keyframe.max_rotation_deg > 0.0) || !(keyframe.min_valid_fraction >= 0.0)) {
    throw Error(ErrorKind::kValidation, "keyframe thresholds must be positive");
  }
  if (provider != "oracle" && provider != "constant" && provider.rfind("file:", 0) != 0) {
    throw Error(ErrorKind::kValidation,
                "provider must be oracle, constant or file:<dir>, got '" + provider + "'");
  }
}

std::shared_ptr<ConsistencyProvider> make_provider(const std::string& spec,
                                                   std::shared_ptr<const GroundTruth> truth,
                                                   const OracleConfig& oracle) {
  if (spec == "constant") return std::make_shared<ConstantProvider>();
  if (spec == "oracle") {
    if (!truth) throw Error(ErrorKind::kMissingGroundTruth, "oracle provider needs ground truth");
    return std::make_shared<OracleProvider>(std::move(truth), oracle);
  }
  if (spec.rfind("file:", 0) == 0 && spec.size() > 5) {
    const std::filesystem::path dir = spec.substr(5);
    if (!std::filesystem::is_directory(dir)) {
      throw Error(ErrorKind::kProviderIo, "map directory not found: " + dir.string());
    }
    return std::make_shared<FileProvider>(dir);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown provider '" + spec + "'");
}

OdometryPipeline::OdometryPipeline(PipelineConfig config,
                                   std::shared_ptr<ConsistencyProvider> provider)
    : config_(std::move(config)), provider_(std::move(provider)) {
  config_.validate();
  if (!provider_) provider_ = std::make_shared<ConstantProvider>();
}

std::optional<OdometryPipeline::PairQuality> OdometryPipeline::pair_quality(
    const RgbdFrame& prev, const RgbdFrame& cur, FrameReport& report) {
  const int w = cur.intensity.width();
  const int h = cur.intensity.height();
  try {
    const UncertaintyPair pair = provider_->get_uncertainty(prev, cur);
    require_same_shape(pair.log_photo, cur.intensity, "photometric log-covariance");
    require_same_shape(pair.log_geo, cur.intensity, "geometric log-covariance");
    return PairQuality{pairwise_quality(pair.log_photo, Branch::kPhoto),
                       pairwise_quality(pair.log_geo, Branch::kGeo)};
  } catch (const Error& e) {
    report.events.push_back({EventKind::kProviderFallback, cur.index, e.what()});
    return PairQuality{unit_quality(w, h, Branch::kPhoto), unit_quality(w, h, Branch::kGeo)};
  }
}

void OdometryPipeline::select_support(Keyframe& kf, FrameReport& report) const {
  SelectorConfig sc = config_.selector;
  sc.seed = selector_seed(config_.seed, kf.keyframe_index);
  kf.support = cwvo::select_support(kf.frame.intensity, kf.frame.depth, kf.prior.photo, sc);
  report.events.push_back({EventKind::kSupportSelected, report.frame,
                           "keyframe " + std::to_string(kf.keyframe_index) + ": " +
                               std::to_string(kf.support.size()) + " pixels"});
}

void OdometryPipeline::refresh_weights() {
  const int w = current_->frame.intensity.width();
  const int h = current_->frame.intensity.height();
  weights_ = config_.mode == AblationMode::kFull
                 ? weights_from_prior(current_->prior)
                 : weights_from_prior(unit_prior(w, h, current_->frame.index));
}

void OdometryPipeline::create_keyframe(const RgbdFrame& frame, const Se3Pose& world_pose,
                                       const std::optional<PairQuality>& incoming,
                                       FrameReport& report) {
  auto kf = std::make_shared<Keyframe>();
  kf->frame = frame;
  kf->world_pose = world_pose;
  kf->keyframe_index = keyframe_count_++;
  kf->pyramid = ImagePyramid(frame.intensity, config_.tracker.levels);
  const int w = frame.intensity.width();
  const int h = frame.intensity.height();
  report.events.push_back({EventKind::kKeyframe, frame.index,
                           "keyframe " + std::to_string(kf->keyframe_index)});

  selection_pending_ = false;
  finalize_pending_ = false;
  if (!uses_priors()) {
    kf->prior = unit_prior(w, h, frame.index);
  } else if (incoming) {
    kf->prior = provisional_prior(incoming->photo, incoming->geo, frame.index);
    finalize_pending_ = true;
  } else {
    // No (T-1, T) pair: selection waits for (T, T+1), which then stands alone.
    kf->prior = unit_prior(w, h, frame.index);
    kf->prior.finalized = false;
    selection_pending_ = true;
  }
  current_ = kf;
  if (!selection_pending_) select_support(*current_, report);

  window_.push_back(current_);
  while (static_cast<int>(window_.size()) > config_.window_size) {
    report.events.push_back({EventKind::kEvicted, frame.index,
                             "keyframe " + std::to_string(window_.front()->keyframe_index)});
    window_.pop_front();
  }
  refresh_weights();
  report.new_keyframe = true;
}

FrameReport OdometryPipeline::process_frame(const RgbdFrame& frame) {
  FrameReport report;
  report.frame = frame.index;
  report.timestamp = frame.timestamp;
  report.prior_selection = uses_priors();
  report.prior_weighting = config_.mode == AblationMode::kFull;

  if (!current_) {
    create_keyframe(frame, Se3Pose::identity(), std::nullopt, report);
    report.world_pose = Se3Pose::identity();
    report.host_prior_finalized = current_->prior.finalized;
    recent_poses_ = {report.world_pose};
    previous_frame_ = frame;
    return report;
  }

  std::optional<PairQuality> pair;
  if (uses_priors()) pair = pair_quality(*previous_frame_, frame, report);

  if (pair && current_->frame.index == previous_frame_->index) {
    if (selection_pending_) {
      current_->prior = provisional_prior(pair->photo, pair->geo, current_->frame.index);
      selection_pending_ = false;
      select_support(*current_, report);
    } else if (finalize_pending_) {
      current_->prior = finalize_prior(current_->prior, pair->photo, pair->geo);
      report.events.push_back({EventKind::kPriorFinalized, frame.index,
                               "keyframe " + std::to_string(current_->keyframe_index)});
    }
    finalize_pending_ = false;
    refresh_weights();
  }

  const Se3Pose& last = recent_poses_.back();
  const Se3Pose predicted =
      recent_poses_.size() >= 2 ? last * (recent_poses_.front().inverse() * last) : last;
  const Se3Pose init = (predicted.inverse() * current_->world_pose).normalized();

  Se3Pose camera_from_host = init;
  report.host_keyframe = current_->frame.index;
  report.host_prior_finalized = current_->prior.finalized;
  try {
    const ImagePyramid target(frame.intensity, config_.tracker.levels);
    TrackResult result = track_frame(*current_, target, init, &weights_, config_.tracker);
    camera_from_host = result.pose;
    const LevelReport& fine = result.levels.back();
    report.tracked = true;
    report.initial_energy = fine.initial_energy;
    report.final_energy = fine.final_energy;
    report.valid_fraction = fine.valid_fraction;
    for (const auto& l : result.levels) report.iterations += l.iterations;
    report.levels = std::move(result.levels);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kTrackingDegenerate && e.kind() != ErrorKind::kDegenerateGeometry) {
      throw;
    }
    report.events.push_back({EventKind::kTrackingFallback, frame.index, e.what()});
  }

  report.world_pose = (current_->world_pose * camera_from_host.inverse()).normalized();
  if (keyframe_criterion(*current_, camera_from_host, report.valid_fraction, config_.keyframe)) {
    create_keyframe(frame, report.world_pose, pair, report);
  }

  recent_poses_.push_back(report.world_pose);
  if (recent_poses_.size() > 2) recent_poses_.erase(recent_poses_.begin());
  previous_frame_ = frame;
  return report;
}

double mean_support_displacement(const Keyframe& host, const Se3Pose& camera_from_host) {
  const Intrinsics& k = host.frame.intrinsics;
  double sum = 0.0;
  int count = 0;
  for (const SupportPixel& sp : host.support) {
    const Vec2 p(sp.x, sp.y);
    const auto q = try_project(k, camera_from_host * backproject(k, p, sp.depth));
    if (!q) continue;
    sum += (q->pixel - p).norm();
    ++count;
  }
  return count > 0 ? sum / count : 0.0;
}

bool keyframe_criterion(const Keyframe& host, const Se3Pose& camera_from_host,
                        double valid_fraction, const KeyframeConfig& config) {
  const double degrees = rotation_angle(camera_from_host) * 180.0 / std::numbers::pi;
  return mean_support_displacement(host, camera_from_host) > config.max_flow_px ||
         camera_from_host.translation().norm() > config.max_translation ||
         degrees > config.max_rotation_deg || valid_fraction < config.min_valid_fraction;
}

RunResult run_sequence(const std::vector<RgbdFrame>& frames,
                       std::shared_ptr<ConsistencyProvider> provider,
                       const PipelineConfig& config) {
  RunResult result;
  OdometryPipeline pipeline(config, std::move(provider));
  for (const RgbdFrame& frame : frames) {
    FrameReport report = pipeline.process_frame(frame);
    result.trajectory.push_back(frame.timestamp, report.world_pose);
    result.reports.push_back(std::move(report));
  }
  return result;
}

RunResult run_sequence(const DatasetIndex& dataset, const PipelineConfig& config) {
  std::shared_ptr<const GroundTruth> truth;
  const bool needs_truth = config.mode != AblationMode::kBaseline && config.provider == "oracle";
  if (needs_truth) truth = load_ground_truth(dataset);
  OdometryPipeline pipeline(config, needs_truth || config.mode != AblationMode::kBaseline
                                        ? make_provider(config.provider, truth, config.oracle)
                                        : std::make_shared<ConstantProvider>());
  RunResult result;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const RgbdFrame frame = load_frame(dataset, i);
    FrameReport report = pipeline.process_frame(frame);
    result.trajectory.push_back(frame.timestamp, report.world_pose);
    result.reports.push_back(std::move(report));
  }
  return result;
}

std::string format_run_report(const RunResult& result) {
  std::ostringstream out;
  for (const FrameReport& r : result.reports) {
    out << "frame " << r.frame << " t=" << fmt("%.6f", r.timestamp) << " host=" << r.host_keyframe
        << " tracked=" << r.tracked << " energy=" << fmt("%.9g", r.initial_energy) << "->"
        << fmt("%.9g", r.final_energy) << " valid=" << fmt("%.6f", r.valid_fraction)
        << " iterations=" << r.iterations << " keyframe=" << r.new_keyframe
        << " prior_selection=" << r.prior_selection << " prior_weighting=" << r.prior_weighting
        << "\n";
    for (const PipelineEvent& e : r.events) {
      out << "event " << e.frame << " " << to_string(e.kind) << " " << e.detail << "\n";
    }
  }
  return out.str();
}

}  // namespace cwvo
