#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cwvo/config.hpp"
#include "cwvo/dataset.hpp"
#include "cwvo/pixel_selector.hpp"
#include "cwvo/provider.hpp"
#include "cwvo/tracker.hpp"
#include "cwvo/trajectory.hpp"

namespace cwvo {

/// baseline: unit prior for selection and weighting; select: prior-modulated
/// selection, unit weights; full: both.
enum class AblationMode { kBaseline, kSelect, kFull };

std::string to_string(AblationMode mode);
AblationMode parse_ablation_mode(const std::string& name);

struct KeyframeConfig {
  double max_flow_px = 12.0;
  double max_translation = 0.1;
  double max_rotation_deg = 5.0;
  double min_valid_fraction = 0.5;
};

struct PipelineConfig {
  std::string provider = "oracle";
  AblationMode mode = AblationMode::kFull;
  std::uint64_t seed = 0;
  OracleConfig oracle;
  TrackingConfig tracker;
  SelectorConfig selector;
  KeyframeConfig keyframe;
  int window_size = 7;

  /// Reads the keys listed in the README; unknown keys are rejected.
  static PipelineConfig from_config(const KeyValueConfig& config);
  void validate() const;
};

/// Builds "oracle", "constant" or "file:<dir>" providers.
std::shared_ptr<ConsistencyProvider> make_provider(const std::string& spec,
                                                   std::shared_ptr<const GroundTruth> truth,
                                                   const OracleConfig& oracle);

enum class EventKind {
  kKeyframe,
  kSupportSelected,
  kPriorFinalized,
  kEvicted,
  kTrackingFallback,
  kProviderFallback,
};

std::string to_string(EventKind kind);

struct PipelineEvent {
  EventKind kind = EventKind::kKeyframe;
  int frame = 0;
  std::string detail;
};

struct FrameReport {
  int frame = 0;
  double timestamp = 0.0;
  Se3Pose world_pose;
  int host_keyframe = -1;  ///< frame index of the host, -1 when not tracked
  bool tracked = false;
  double initial_energy = 0.0;  ///< level 0
  double final_energy = 0.0;
  double valid_fraction = 0.0;
  int iterations = 0;  ///< summed over levels
  bool new_keyframe = false;
  /// Instrumentation: whether the host prior shaped selection / weighting.
  bool prior_selection = false;
  bool prior_weighting = false;
  bool host_prior_finalized = false;
  std::vector<LevelReport> levels;
  std::vector<PipelineEvent> events;
};

/// Frame-to-keyframe odometry with a bounded FIFO keyframe window.
class OdometryPipeline {
 public:
  OdometryPipeline(PipelineConfig config, std::shared_ptr<ConsistencyProvider> provider);

  FrameReport process_frame(const RgbdFrame& frame);

  const std::deque<std::shared_ptr<const Keyframe>>& window() const noexcept { return window_; }
  const Keyframe* current_keyframe() const noexcept { return current_.get(); }
  const PipelineConfig& config() const noexcept { return config_; }

 private:
  struct PairQuality {
    QualityMap photo;
    QualityMap geo;
  };

  std::optional<PairQuality> pair_quality(const RgbdFrame& prev, const RgbdFrame& cur,
                                          FrameReport& report);
  void select_support(Keyframe& kf, FrameReport& report) const;
  void refresh_weights();
  void create_keyframe(const RgbdFrame& frame, const Se3Pose& world_pose,
                       const std::optional<PairQuality>& incoming, FrameReport& report);
  bool uses_priors() const noexcept { return config_.mode != AblationMode::kBaseline; }

  PipelineConfig config_;
  std::shared_ptr<ConsistencyProvider> provider_;
  std::deque<std::shared_ptr<const Keyframe>> window_;
  std::shared_ptr<Keyframe> current_;
  WeightMaps weights_;
  bool selection_pending_ = false;  ///< first keyframe waits for its (T, T+1) pair
  bool finalize_pending_ = false;
  int keyframe_count_ = 0;
  std::optional<RgbdFrame> previous_frame_;
  std::vector<Se3Pose> recent_poses_;  ///< last two world poses
};

/// Mean pixel displacement of the host's support pixels under `camera_from_host`,
/// over the pixels that project in front of the camera.
double mean_support_displacement(const Keyframe& host, const Se3Pose& camera_from_host);

/// Strict inequalities: a displacement exactly at the threshold does not trigger.
bool keyframe_criterion(const Keyframe& host, const Se3Pose& camera_from_host,
                        double valid_fraction, const KeyframeConfig& config);

struct RunResult {
  Trajectory trajectory;
  std::vector<FrameReport> reports;
};

RunResult run_sequence(const std::vector<RgbdFrame>& frames,
                       std::shared_ptr<ConsistencyProvider> provider,
                       const PipelineConfig& config);

/// Loads the index (failing before any processing), builds the provider from
/// config.provider and streams frames from disk.
RunResult run_sequence(const DatasetIndex& dataset, const PipelineConfig& config);

/// Text report: one line per frame plus one per event.
std::string format_run_report(const RunResult& result);

}  // namespace cwvo
