#include "cwvo/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cwvo/cmap.hpp"
#include "cwvo/config.hpp"
#include "cwvo/error.hpp"
#include "cwvo/image_io.hpp"

namespace fs = std::filesystem;

namespace cwvo {
namespace {

struct StampedFile {
  double timestamp;
  std::string file;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<StampedFile> read_file_list(const fs::path& path) {
  const std::string text = read_text(path);
  std::istringstream in(text);
  std::vector<StampedFile> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string stamp;
    std::string file;
    double t = 0.0;
    if (!(fields >> stamp >> file) || !parse_number(stamp, t) || !std::isfinite(t)) {
      throw Error(ErrorKind::kParse,
                  path.string() + ":" + std::to_string(number) + ": expected 'timestamp filename'");
    }
    out.push_back({t, file});
  }
  return out;
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorKind::kIo, "missing file " + path.string());
}

DatasetIndex load_tum(const fs::path& root) {
  DatasetIndex index;
  index.root = root;
  index.format = DatasetFormat::kTum;
  index.depth_scale = kTumDepthScale;

  const auto rgb = read_file_list(root / "rgb.txt");
  const auto depth = read_file_list(root / "depth.txt");

  // Greedy association: closest pairs first, each stamp used once.
  struct Candidate {
    double gap;
    std::size_t rgb;
    std::size_t depth;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    for (std::size_t j = 0; j < depth.size(); ++j) {
      const double gap = std::abs(rgb[i].timestamp - depth[j].timestamp);
      if (gap <= kMaxMatchGap) candidates.push_back({gap, i, j});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.gap < b.gap; });
  std::vector<bool> rgb_used(rgb.size(), false);
  std::vector<bool> depth_used(depth.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& c : candidates) {
    if (rgb_used[c.rgb] || depth_used[c.depth]) continue;
    rgb_used[c.rgb] = true;
    depth_used[c.depth] = true;
    pairs.emplace_back(c.rgb, c.depth);
  }
  if (pairs.empty()) {
    throw Error(ErrorKind::kNoAssociation,
                root.string() + ": no rgb/depth pair within " + std::to_string(kMaxMatchGap) + " s");
  }
  std::sort(pairs.begin(), pairs.end());
  for (auto [i, j] : pairs) {
    DatasetEntry e;
    e.timestamp = rgb[i].timestamp;
    e.rgb = root / rgb[i].file;
    e.depth = root / depth[j].file;
    require_file(e.rgb);
    require_file(e.depth);
    index.entries.push_back(std::move(e));
  }
  for (std::size_t k = 1; k < index.entries.size(); ++k) {
    if (!(index.entries[k].timestamp > index.entries[k - 1].timestamp)) {
      throw Error(ErrorKind::kParse, root.string() + ": rgb timestamps not strictly increasing");
    }
  }

  const fs::path calib = root / "calibration.txt";
  if (fs::exists(calib)) {
    std::istringstream in(read_text(calib));
    double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
    if (!(in >> fx >> fy >> cx >> cy)) {
      throw Error(ErrorKind::kParse, calib.string() + ":1: expected 'fx fy cx cy'");
    }
    index.intrinsics.fx = fx;
    index.intrinsics.fy = fy;
    index.intrinsics.cx = cx;
    index.intrinsics.cy = cy;
  }
  const RawImage first = read_image(index.entries.front().rgb);
  index.intrinsics.width = first.width;
  index.intrinsics.height = first.height;
  index.intrinsics.validate();

  if (fs::exists(root / "groundtruth.txt")) index.groundtruth = root / "groundtruth.txt";
  return index;
}

DatasetIndex load_synth(const fs::path& root) {
  const fs::path manifest = root / kManifestName;
  const KeyValueConfig cfg = KeyValueConfig::load(manifest);
  cfg.reject_unknown({"format", "width", "height", "intrinsics", "depth_scale", "groundtruth", "frame"});
  if (cfg.get_string("format", "") != "cwvo-synth 1") {
    throw Error(ErrorKind::kParse, manifest.string() + ": unsupported format '" +
                                       cfg.get_string("format", "") + "'");
  }
  DatasetIndex index;
  index.root = root;
  index.format = DatasetFormat::kSynth;
  index.depth_scale = cfg.get_double("depth_scale", kTumDepthScale);
  std::istringstream k(cfg.get_string("intrinsics", ""));
  auto& in = index.intrinsics;
  if (!(k >> in.fx >> in.fy >> in.cx >> in.cy)) {
    throw Error(ErrorKind::kParse, manifest.string() + ": intrinsics must be 'fx fy cx cy'");
  }
  in.width = static_cast<int>(cfg.get_int("width", 0));
  in.height = static_cast<int>(cfg.get_int("height", 0));
  in.validate();

  int number = 0;
  for (const auto& line : cfg.get_all("frame")) {
    std::istringstream fields(line);
    std::string stamp, rgb, depth, flow;
    double t = 0.0;
    if (!(fields >> stamp >> rgb >> depth >> flow) || !parse_number(stamp, t)) {
      throw Error(ErrorKind::kParse, manifest.string() + ": frame " + std::to_string(number) +
                                         ": expected 'timestamp rgb depth flow|-'");
    }
    DatasetEntry e{t, root / rgb, root / depth, flow == "-" ? fs::path{} : root / flow};
    require_file(e.rgb);
    require_file(e.depth);
    if (!e.flow.empty()) require_file(e.flow);
    if (!index.entries.empty() && !(t > index.entries.back().timestamp)) {
      throw Error(ErrorKind::kParse, manifest.string() + ": frame " + std::to_string(number) +
                                         ": timestamps must increase");
    }
    index.entries.push_back(std::move(e));
    ++number;
  }
  const std::string gt = cfg.get_string("groundtruth", "");
  if (!gt.empty()) {
    index.groundtruth = root / gt;
    require_file(index.groundtruth);
  }
  return index;
}

std::string frame_name(std::size_t i, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu.%s", i, ext);
  return buf;
}

}  // namespace

DatasetFormat parse_dataset_format(const std::string& name) {
  if (name == "tum") return DatasetFormat::kTum;
  if (name == "synth") return DatasetFormat::kSynth;
  throw Error(ErrorKind::kInvalidArgument, "unknown dataset format '" + name + "'");
}

DatasetFormat detect_dataset_format(const fs::path& root) {
  return fs::exists(root / kManifestName) ? DatasetFormat::kSynth : DatasetFormat::kTum;
}

DatasetIndex load_dataset(const fs::path& root, DatasetFormat format) {
  if (!fs::is_directory(root)) throw Error(ErrorKind::kIo, "not a directory: " + root.string());
  return format == DatasetFormat::kTum ? load_tum(root) : load_synth(root);
}

DatasetIndex load_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorKind::kIo, "not a directory: " + root.string());
  return load_dataset(root, detect_dataset_format(root));
}

RgbdFrame load_frame(const DatasetIndex& index, std::size_t i) {
  if (i >= index.entries.size()) {
    throw Error(ErrorKind::kInvalidArgument, "frame " + std::to_string(i) + " outside dataset of " +
                                                 std::to_string(index.entries.size()));
  }
  const DatasetEntry& e = index.entries[i];
  RgbdFrame frame;
  frame.index = static_cast<int>(i);
  frame.timestamp = e.timestamp;
  frame.intensity = to_intensity(read_image(e.rgb));
  frame.depth = to_depth(read_image(e.depth), index.depth_scale);
  frame.intrinsics = index.intrinsics;
  if (frame.intensity.width() != index.intrinsics.width ||
      frame.intensity.height() != index.intrinsics.height) {
    throw Error(ErrorKind::kShape, e.rgb.string() + ": image size differs from the sequence");
  }
  require_same_shape(frame.intensity, frame.depth, e.depth.string());
  return frame;
}

Trajectory load_reference(const DatasetIndex& index) {
  if (index.groundtruth.empty()) {
    throw Error(ErrorKind::kMissingGroundTruth, index.root.string() + ": no groundtruth.txt");
  }
  return read_trajectory(index.groundtruth);
}

std::shared_ptr<GroundTruth> load_ground_truth(const DatasetIndex& index) {
  const Trajectory reference = load_reference(index);
  Trajectory stamps;
  for (const auto& e : index.entries) stamps.push_back(e.timestamp, Se3Pose::identity());
  const auto matches = match_timestamps(stamps, reference);
  if (matches.size() != index.size()) {
    throw Error(ErrorKind::kMissingGroundTruth,
                index.root.string() + ": " + std::to_string(index.size() - matches.size()) +
                    " frames lack a ground-truth pose");
  }
  auto truth = std::make_shared<GroundTruth>();
  for (auto [frame, ref] : matches) truth->poses.push_back(reference[ref].pose);
  truth->flow_into.resize(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (!index.entries[i].flow.empty()) truth->flow_into[i] = read_flow(index.entries[i].flow);
  }
  return truth;
}

void write_synthetic_dataset(const fs::path& root, const SyntheticSequence& seq) {
  fs::create_directories(root / "rgb");
  fs::create_directories(root / "depth");
  fs::create_directories(root / "flow");
  const Intrinsics& k = seq.intrinsics;

  std::ostringstream manifest;
  manifest << "format = cwvo-synth 1\n";
  manifest << "width = " << k.width << "\nheight = " << k.height << "\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "intrinsics = %.17g %.17g %.17g %.17g\n", k.fx, k.fy, k.cx, k.cy);
  manifest << buf;
  manifest << "depth_scale = " << kTumDepthScale << "\n";
  manifest << "groundtruth = groundtruth.txt\n";

  Trajectory gt;
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const RgbdFrame& f = seq.frames[i];
    const std::string rgb = "rgb/" + frame_name(i, "pgm");
    const std::string depth = "depth/" + frame_name(i, "pgm");
    write_pgm(root / rgb, quantize_unit(f.intensity));
    write_pgm(root / depth, quantize_depth(f.depth, kTumDepthScale));
    std::string flow = "-";
    if (i < seq.truth.flow_into.size() && !seq.truth.flow_into[i].dx.empty()) {
      flow = "flow/" + frame_name(i, "flow");
      write_flow(root / flow, seq.truth.flow_into[i]);
    }
    std::snprintf(buf, sizeof buf, "frame = %.6f %s %s %s\n", f.timestamp, rgb.c_str(),
                  depth.c_str(), flow.c_str());
    manifest << buf;
    gt.push_back(f.timestamp, seq.truth.poses.at(i));
  }
  write_trajectory(root / "groundtruth.txt", gt);

  std::ofstream out(root / kManifestName, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + (root / kManifestName).string());
  out << manifest.str();
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + (root / kManifestName).string());
}

}  // namespace cwvo
