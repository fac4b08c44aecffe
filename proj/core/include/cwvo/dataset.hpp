#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "cwvo/frame.hpp"
#include "cwvo/geometry.hpp"
#include "cwvo/provider.hpp"
#include "cwvo/synth.hpp"
#include "cwvo/trajectory.hpp"

namespace cwvo {

enum class DatasetFormat { kTum, kSynth };

DatasetFormat parse_dataset_format(const std::string& name);
/// kSynth when `root` holds a manifest, kTum otherwise.
DatasetFormat detect_dataset_format(const std::filesystem::path& root);

inline constexpr const char* kManifestName = "manifest.txt";
inline constexpr double kTumDepthScale = 5000.0;

struct DatasetEntry {
  double timestamp = 0.0;
  std::filesystem::path rgb;
  std::filesystem::path depth;
  std::filesystem::path flow;  ///< synth only; empty for the first frame
};

struct DatasetIndex {
  std::filesystem::path root;
  DatasetFormat format = DatasetFormat::kTum;
  std::vector<DatasetEntry> entries;
  double depth_scale = kTumDepthScale;
  Intrinsics intrinsics{525.0, 525.0, 319.5, 239.5, 640, 480};
  std::filesystem::path groundtruth;  ///< empty when absent

  std::size_t size() const noexcept { return entries.size(); }
};

/// TUM: rgb.txt / depth.txt associated greedily by nearest timestamp within
/// kMaxMatchGap; optional calibration.txt "fx fy cx cy". Synth: the manifest.
DatasetIndex load_dataset(const std::filesystem::path& root, DatasetFormat format);
DatasetIndex load_dataset(const std::filesystem::path& root);

RgbdFrame load_frame(const DatasetIndex& index, std::size_t i);

/// Reference trajectory from groundtruth.txt, or kMissingGroundTruth.
Trajectory load_reference(const DatasetIndex& index);

/// Per-frame poses (nearest groundtruth stamp) and, for synth data, flow.
std::shared_ptr<GroundTruth> load_ground_truth(const DatasetIndex& index);

/// Writes manifest.txt, rgb/ and depth/ 16-bit PGMs, flow/*.flow and
/// groundtruth.txt.
void write_synthetic_dataset(const std::filesystem::path& root, const SyntheticSequence& sequence);

}  // namespace cwvo
