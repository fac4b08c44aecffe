// cwvo: synthetic data generation, tracking, evaluation and prior inspection.
//
// Exit codes: 0 success, 1 usage or invalid input, 2 runtime failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cwvo/cmap.hpp"
#include "cwvo/config.hpp"
#include "cwvo/dataset.hpp"
#include "cwvo/error.hpp"
#include "cwvo/image_io.hpp"
#include "cwvo/pipeline.hpp"
#include "cwvo/synth.hpp"
#include "cwvo/trajectory.hpp"

namespace fs = std::filesystem;
using namespace cwvo;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

/// Failure of user input (flags, config or spec contents).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename F>
auto as_usage(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

void export_oracle_maps(const fs::path& root) {
  const DatasetIndex index = load_dataset(root, DatasetFormat::kSynth);
  OracleProvider oracle(load_ground_truth(index));
  fs::create_directories(root / "oracle" / "errors");
  if (index.size() < 2) return;
  RgbdFrame prev = load_frame(index, 0);
  for (std::size_t i = 1; i < index.size(); ++i) {
    RgbdFrame cur = load_frame(index, i);
    const UncertaintyPair pair = oracle.get_uncertainty(prev, cur);
    const std::string name = cmap_filename(prev.index, cur.index);
    write_cmap(root / "oracle" / name, pair.log_photo, pair.log_geo);
    ErrorMap photo = oracle.photometric_errors(prev, cur);
    ErrorMap geo = oracle.geometric_errors(prev, cur);
    for (ErrorMap* m : {&photo, &geo}) {
      for (std::size_t p = 0; p < m->values.size(); ++p) {
        if (!m->valid[p]) m->values[p] = std::nan("");
      }
    }
    write_cmap(root / "oracle" / "errors" / name, photo.values, geo.values);
    prev = std::move(cur);
  }
}

PipelineConfig load_pipeline_config(const std::string& path, const std::string& mode,
                                    const std::string& provider, std::int64_t seed) {
  return as_usage([&] {
    KeyValueConfig cfg = KeyValueConfig::load(path);
    if (!mode.empty()) cfg.set("mode", mode);
    if (!provider.empty()) cfg.set("provider", provider);
    if (seed >= 0) cfg.set("seed", std::to_string(seed));
    return PipelineConfig::from_config(cfg);
  });
}

DatasetIndex open_dataset(const std::string& dir, const std::string& format) {
  return format == "auto" ? load_dataset(dir) : load_dataset(dir, parse_dataset_format(format));
}

QualityMap quality_for(ConsistencyProvider& provider, const RgbdFrame& j, const RgbdFrame& i,
                       Branch branch) {
  const UncertaintyPair pair = provider.get_uncertainty(j, i);
  return pairwise_quality(branch == Branch::kPhoto ? pair.log_photo : pair.log_geo, branch);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consistency-weighted direct RGB-D odometry"};
  app.require_subcommand(1);

  // synth
  std::string spec_path, synth_out;
  std::int64_t synth_seed = -1;
  bool oracle_maps = false;
  auto* synth = app.add_subcommand("synth", "Render a scene description to a dataset directory");
  synth->add_option("--spec", spec_path, "Scene description file")->required();
  synth->add_option("--out", synth_out, "Output dataset directory")->required();
  synth->add_option("--seed", synth_seed, "Overrides the spec's seed (-1 keeps it)")
      ->capture_default_str();
  synth->add_flag("--oracle-maps", oracle_maps,
                  "Also write oracle log-covariance and error maps under <out>/oracle");

  // track
  std::string data_dir, config_path, mode, provider, traj_out, report_out;
  std::string format = "auto";
  std::int64_t track_seed = -1;
  auto* track = app.add_subcommand("track", "Run odometry on a dataset");
  track->add_option("--data", data_dir, "Dataset directory")->required();
  track->add_option("--config", config_path, "Pipeline config file")->required();
  track->add_option("--mode", mode, "baseline | select | full (overrides config)")
      ->check(CLI::IsMember({"baseline", "select", "full"}));
  track->add_option("--provider", provider, "oracle | constant | file:<dir> (overrides config)");
  track->add_option("--out", traj_out, "Trajectory output (TUM format)")->required();
  track->add_option("--report", report_out, "Run report output (default <out>.report.txt)");
  track->add_option("--format", format, "auto | tum | synth")->capture_default_str()
      ->check(CLI::IsMember({"auto", "tum", "synth"}));
  track->add_option("--seed", track_seed, "Overrides the config seed (-1 keeps it)")
      ->capture_default_str();

  // eval
  std::string est_path, ref_path;
  int rpe_delta = 1;
  auto* eval = app.add_subcommand("eval", "ATE and translational RPE of an estimate");
  eval->add_option("--est", est_path, "Estimated trajectory")->required();
  eval->add_option("--ref", ref_path, "Reference trajectory")->required();
  eval->add_option("--rpe-delta", rpe_delta, "RPE frame delta")->capture_default_str()
      ->check(CLI::PositiveNumber);

  // ablate
  std::string ablate_data, ablate_config, ablate_provider, ablate_format = "auto";
  std::int64_t ablate_seed = -1;
  auto* ablate = app.add_subcommand("ablate", "Run baseline, select and full; print a TSV table");
  ablate->add_option("--data", ablate_data, "Dataset directory")->required();
  ablate->add_option("--config", ablate_config, "Pipeline config file")->required();
  ablate->add_option("--provider", ablate_provider, "Overrides the config provider");
  ablate->add_option("--format", ablate_format, "auto | tum | synth")->capture_default_str()
      ->check(CLI::IsMember({"auto", "tum", "synth"}));
  ablate->add_option("--seed", ablate_seed, "Overrides the config seed (-1 keeps it)")
      ->capture_default_str();

  // prior-dump
  std::string dump_data, dump_provider = "oracle", dump_out, dump_format = "auto";
  int dump_frame = 0;
  auto* dump = app.add_subcommand(
      "prior-dump", "Write a frame's host-side quality maps as 16-bit PGMs <out>_photo/_geo.pgm");
  dump->add_option("--data", dump_data, "Dataset directory")->required();
  dump->add_option("--provider", dump_provider, "oracle | constant | file:<dir>")
      ->capture_default_str();
  dump->add_option("--frame", dump_frame, "Host frame index")->required();
  dump->add_option("--out", dump_out, "Output path prefix")->required();
  dump->add_option("--format", dump_format, "auto | tum | synth")->capture_default_str()
      ->check(CLI::IsMember({"auto", "tum", "synth"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth) {
      SceneSpec spec = as_usage([&] { return parse_scene_spec(KeyValueConfig::load(spec_path)); });
      if (synth_seed >= 0) spec.seed = static_cast<std::uint64_t>(synth_seed);
      const SyntheticSequence seq = as_usage([&] { return render_sequence(spec); });
      write_synthetic_dataset(synth_out, seq);
      if (oracle_maps) export_oracle_maps(synth_out);
      std::cout << "wrote " << seq.frames.size() << " frames to " << synth_out << "\n";
    } else if (*track) {
      const PipelineConfig cfg = load_pipeline_config(config_path, mode, provider, track_seed);
      const DatasetIndex index = open_dataset(data_dir, format);
      const RunResult result = run_sequence(index, cfg);
      write_trajectory(traj_out, result.trajectory);
      write_text(report_out.empty() ? traj_out + ".report.txt" : report_out,
                 format_run_report(result));
    } else if (*eval) {
      const Trajectory est = read_trajectory(est_path);
      const Trajectory ref = read_trajectory(ref_path);
      std::printf("ATE_RMSE %.9g\n", ate_rmse(est, ref));
      std::printf("RPE_T_RMSE %.9g\n", rpe_trans_rmse(est, ref, rpe_delta));
    } else if (*ablate) {
      const PipelineConfig base =
          load_pipeline_config(ablate_config, "", ablate_provider, ablate_seed);
      const DatasetIndex index = open_dataset(ablate_data, ablate_format);
      const Trajectory ref = load_reference(index);
      for (AblationMode m : {AblationMode::kBaseline, AblationMode::kSelect, AblationMode::kFull}) {
        PipelineConfig cfg = base;
        cfg.mode = m;
        const RunResult result = run_sequence(index, cfg);
        std::printf("%s\t%.9g\t%.9g\n", to_string(m).c_str(), ate_rmse(result.trajectory, ref),
                    rpe_trans_rmse(result.trajectory, ref));
      }
    } else if (*dump) {
      const DatasetIndex index = open_dataset(dump_data, dump_format);
      if (dump_frame < 0 || static_cast<std::size_t>(dump_frame) >= index.size()) {
        throw UsageError("frame " + std::to_string(dump_frame) + " outside [0, " +
                         std::to_string(index.size()) + ")");
      }
      if (index.size() < 2) throw UsageError("prior-dump needs at least two frames");
      std::shared_ptr<const GroundTruth> truth;
      if (dump_provider == "oracle") truth = load_ground_truth(index);
      auto prov = make_provider(dump_provider, truth, OracleConfig{});
      const auto t = static_cast<std::size_t>(dump_frame);
      const RgbdFrame host = load_frame(index, t);
      QualityMap maps[2];
      const Branch branches[2] = {Branch::kPhoto, Branch::kGeo};
      std::optional<RgbdFrame> before, after;
      if (t > 0) before = load_frame(index, t - 1);
      if (t + 1 < index.size()) after = load_frame(index, t + 1);
      for (int b = 0; b < 2; ++b) {
        if (before && after) {
          maps[b] = fuse_bidirectional(quality_for(*prov, *before, host, branches[b]),
                                       quality_for(*prov, host, *after, branches[b]));
        } else {
          maps[b] = before ? quality_for(*prov, *before, host, branches[b])
                           : quality_for(*prov, host, *after, branches[b]);
        }
      }
      write_pgm(dump_out + "_photo.pgm", quantize_unit(maps[0].values));
      write_pgm(dump_out + "_geo.pgm", quantize_unit(maps[1].values));
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
