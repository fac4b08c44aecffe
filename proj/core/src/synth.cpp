#include "cwvo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace cwvo {
namespace {

constexpr int kTextureComponents = 24;
constexpr double kOctaves = 4.0;

/// Sum of sinusoids with wavelengths in [lambda, 16 lambda], scaled so that
/// mean +- contrast spans two standard deviations (renderers clamp to [0, 1]).
/// Positive sharpness passes the standardised sum through tanh instead, giving
/// blotches with crisp (but smooth) rims.
class SineTexture {
 public:
  SineTexture(double wavelength, double mean, double contrast, std::uint64_t seed,
              double sharpness = 0.0)
      : mean_(mean), contrast_(contrast), sharpness_(sharpness) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double total = 0.0;
    for (int i = 0; i < kTextureComponents; ++i) {
      // Log-uniform over kOctaves octaves with amplitude growing as sqrt(lambda),
      // so every pyramid level keeps texture.
      const double octave = kOctaves * unit(rng);
      const double lambda = wavelength * std::exp2(octave);
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      const double k = 2.0 * std::numbers::pi / lambda;
      Component c{k * std::cos(angle), k * std::sin(angle), 2.0 * std::numbers::pi * unit(rng),
                  std::exp2(0.5 * octave) * (0.5 + 0.5 * unit(rng))};
      total += c.amplitude;
      components_.push_back(c);
    }
    double power = 0.0;
    for (auto& c : components_) {
      c.amplitude /= total;
      power += 0.5 * c.amplitude * c.amplitude;
    }
    sigma_ = std::sqrt(power);
  }

  double operator()(double x, double y) const {
    double v = 0.0;
    for (const auto& c : components_) v += c.amplitude * std::sin(c.kx * x + c.ky * y + c.phase);
    if (sharpness_ > 0.0) return mean_ + contrast_ * std::tanh(sharpness_ * v / sigma_);
    return mean_ + 0.5 * contrast_ * v / sigma_;
  }

 private:
  struct Component {
    double kx;
    double ky;
    double phase;
    double amplitude;
  };
  double mean_;
  double contrast_;
  double sharpness_;
  double sigma_ = 1.0;
  std::vector<Component> components_;
};

struct Hit {
  int surface = -1;
  double depth = 0.0;
  Vec3 world = Vec3::Zero();
};

Hit cast_ray(const std::vector<TexturedPlane>& planes, const Se3Pose& world_from_camera,
             const Intrinsics& k, double u, double v) {
  const Vec3 dir_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
  const Vec3 dir = world_from_camera.rotation() * dir_cam;
  const Vec3& origin = world_from_camera.translation();
  Hit best;
  if (std::abs(dir.z()) < 1e-12) return best;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const TexturedPlane& p = planes[i];
    const double s = (p.depth - origin.z()) / dir.z();
    if (!(s > kDefaultZMin)) continue;
    const Vec3 x = origin + s * dir;
    if (x.x() < p.x_min || x.x() > p.x_max || x.y() < p.y_min || x.y() > p.y_max) continue;
    if (best.surface < 0 || s < best.depth) best = {static_cast<int>(i), s, x};
  }
  return best;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::mt19937_64 rng(seq);
  return rng();
}

bool region_inside(const Region& r, const Intrinsics& k) {
  return r.width > 0 && r.height > 0 && r.x >= 0 && r.y >= 0 && r.x + r.width <= k.width &&
         r.y + r.height <= k.height;
}

Mat3 rotation_from(const Vec3& omega) { return se3_exp({Vec3::Zero(), omega}).rotation(); }

void apply_sprite(SyntheticSequence& seq, const Degradation& d) {
  const SineTexture texture(d.wavelength_px, 0.5, d.magnitude, d.seed);
  const int w = seq.intrinsics.width;
  const int h = seq.intrinsics.height;
  // Fraction of the pixel footprint [p - 0.5, p + 0.5] covered by [lo, lo + size].
  const auto overlap = [](int p, double lo, double size) {
    return std::max(0.0, std::min(p + 0.5, lo + size) - std::max(p - 0.5, lo));
  };
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    const int k = static_cast<int>(f);
    if (!d.active(k)) continue;
    RgbdFrame& frame = seq.frames[f];
    const double ox = d.region.x + k * d.motion.x();
    const double oy = d.region.y + k * d.motion.y();
    const double gain = 1.0 + d.flicker * (k % 2 == 0 ? -1.0 : 1.0);
    const double depth = d.depth + k * d.depth_rate;
    FlowField* flow = f > 0 && !seq.truth.flow_into[f].dx.empty() ? &seq.truth.flow_into[f] : nullptr;
    for (int y = 0; y < h; ++y) {
      const double ay = overlap(y, oy - 0.5, d.region.height);
      if (ay <= 0.0) continue;
      for (int x = 0; x < w; ++x) {
        const double alpha = overlap(x, ox - 0.5, d.region.width) * ay;
        if (alpha <= 0.0) continue;
        const double value = std::clamp(gain * texture(x - ox, y - oy), 0.0, 1.0);
        frame.intensity(x, y) = (1.0 - alpha) * frame.intensity(x, y) + alpha * value;
        if (alpha >= 0.5) {
          frame.depth(x, y) = depth;
          seq.true_depth[f](x, y) = depth;
        }
        seq.dynamic[f](x, y) = 1;
        if (flow) {
          // Partially covered pixels mix two motions and carry no flow.
          const bool full = alpha >= 1.0 - 1e-12 && d.active(k - 1);
          flow->dx(x, y) = d.motion.x();
          flow->dy(x, y) = d.motion.y();
          flow->valid(x, y) = full ? 1 : 0;
        }
      }
    }
  }
}

}  // namespace

ImageD procedural_texture(int width, int height, double wavelength_px, double mean,
                          double contrast, std::uint64_t seed) {
  const SineTexture texture(wavelength_px, mean, contrast, seed);
  ImageD out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out(x, y) = texture(x, y);
  }
  return out;
}

void SceneSpec::validate() const {
  std::vector<std::string> problems;
  try {
    intrinsics.validate();
  } catch (const Error& e) {
    problems.emplace_back(e.what());
  }
  if (frame_count < 1) problems.emplace_back("frame count must be >= 1");
  if (!(fps > 0.0)) problems.emplace_back("fps must be positive");
  if (supersample < 1 || supersample > 8) problems.emplace_back("supersample must be in [1, 8]");
  if (planes.empty()) problems.emplace_back("scene needs at least one plane");
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const auto& p = planes[i];
    const std::string tag = "plane " + std::to_string(i) + ": ";
    if (!(p.depth > kDefaultZMin) || !std::isfinite(p.depth)) problems.push_back(tag + "depth must exceed z_min");
    if (!(p.x_min < p.x_max) || !(p.y_min < p.y_max)) problems.push_back(tag + "empty extent");
    if (!(p.wavelength_px >= 2.0)) problems.push_back(tag + "wavelength must be >= 2 px");
    if (!(p.sharpness >= 0.0) || !std::isfinite(p.sharpness)) problems.push_back(tag + "sharpness must be >= 0");
    if (!(p.contrast >= 0.0) || p.mean - p.contrast < 0.0 || p.mean + p.contrast > 1.0) {
      problems.push_back(tag + "mean +- contrast must stay within [0, 1]");
    }
  }
  if (trajectory.kind == TrajectoryKind::kExplicit &&
      trajectory.poses.size() != static_cast<std::size_t>(std::max(frame_count, 0))) {
    problems.push_back("explicit trajectory has " + std::to_string(trajectory.poses.size()) +
                       " poses for " + std::to_string(frame_count) + " frames");
  }
  if (trajectory.kind == TrajectoryKind::kSmooth && !(trajectory.period > 0.0)) {
    problems.emplace_back("smooth trajectory period must be positive");
  }
  if (!trajectory.amplitude.allFinite() || !trajectory.velocity.vector().allFinite()) {
    problems.emplace_back("trajectory parameters must be finite");
  }
  for (std::size_t i = 0; i < degradations.size(); ++i) {
    const auto& d = degradations[i];
    const std::string tag = "degradation " + std::to_string(i) + ": ";
    if (!region_inside(d.region, intrinsics)) problems.push_back(tag + "region outside image");
    if (!std::isfinite(d.magnitude) || !std::isfinite(d.offset) || !d.motion.allFinite() ||
        !std::isfinite(d.depth_rate) || !std::isfinite(d.flicker)) {
      problems.push_back(tag + "non-finite magnitude");
    }
    if (d.kind == DegradationKind::kSprite) {
      if (!(d.depth > kDefaultZMin)) problems.push_back(tag + "sprite depth must exceed z_min");
      if (d.depth + (frame_count - 1) * d.depth_rate <= kDefaultZMin) {
        problems.push_back(tag + "sprite reaches the camera");
      }
      if (!(d.wavelength_px >= 2.0)) problems.push_back(tag + "wavelength must be >= 2 px");
    }
    if (d.kind == DegradationKind::kDepthNoise && d.magnitude < 0.0) {
      problems.push_back(tag + "noise sigma must be >= 0");
    }
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid scene spec:";
    for (const auto& p : problems) msg << "\n  - " << p;
    throw Error(ErrorKind::kValidation, msg.str());
  }
}

std::vector<Se3Pose> trajectory_poses(const SceneSpec& spec) {
  const TrajectorySpec& t = spec.trajectory;
  std::vector<Se3Pose> poses;
  poses.reserve(static_cast<std::size_t>(spec.frame_count));
  for (int k = 0; k < spec.frame_count; ++k) {
    switch (t.kind) {
      case TrajectoryKind::kStatic:
        poses.push_back(Se3Pose::identity());
        break;
      case TrajectoryKind::kLinear: {
        Vec6 xi = t.velocity.vector() * static_cast<double>(k);
        poses.push_back(Se3Pose(rotation_from(xi.tail<3>()), xi.head<3>()));
        break;
      }
      case TrajectoryKind::kSmooth: {
        Vec6 xi;
        for (int i = 0; i < 6; ++i) {
          const double freq = 2.0 * std::numbers::pi / t.period * (1.0 + 0.27 * i);
          xi(i) = t.amplitude(i) * std::sin(freq * k);
        }
        poses.push_back(Se3Pose(rotation_from(xi.tail<3>()), xi.head<3>()));
        break;
      }
      case TrajectoryKind::kExplicit:
        poses.push_back(t.poses.at(static_cast<std::size_t>(k)));
        break;
    }
  }
  return poses;
}

SyntheticSequence render_sequence(const SceneSpec& spec) {
  spec.validate();
  const Intrinsics& k = spec.intrinsics;
  const std::vector<Se3Pose> poses = trajectory_poses(spec);
  const double z0 = poses.front().translation().z();

  std::vector<SineTexture> textures;
  for (std::size_t i = 0; i < spec.planes.size(); ++i) {
    const auto& p = spec.planes[i];
    const double lambda_world = p.wavelength_px * std::max(p.depth - z0, 1e-3) / k.fx;
    textures.emplace_back(lambda_world, p.mean, p.contrast, mix(spec.seed, i), p.sharpness);
  }

  SyntheticSequence seq;
  seq.intrinsics = k;
  const auto n = static_cast<std::size_t>(spec.frame_count);
  const int n_sub = spec.supersample;
  std::vector<std::vector<Hit>> hits(n);
  std::vector<Image<int>> surface(n);
  for (std::size_t f = 0; f < n; ++f) {
    RgbdFrame frame;
    frame.index = static_cast<int>(f);
    frame.timestamp = static_cast<double>(f) / spec.fps;
    frame.intensity = ImageD(k.width, k.height);
    frame.depth = ImageD(k.width, k.height);
    frame.intrinsics = k;
    surface[f] = Image<int>(k.width, k.height, -1);
    hits[f].resize(static_cast<std::size_t>(k.width) * k.height);
    for (int y = 0; y < k.height; ++y) {
      for (int x = 0; x < k.width; ++x) {
        const Hit hit = cast_ray(spec.planes, poses[f], k, x, y);
        hits[f][frame.intensity.index(x, y)] = hit;
        surface[f](x, y) = hit.surface;
        if (hit.surface >= 0) frame.depth(x, y) = hit.depth;
        double sum = 0.0;
        for (int sy = 0; sy < n_sub; ++sy) {
          for (int sx = 0; sx < n_sub; ++sx) {
            const double u = x + (sx + 0.5) / n_sub - 0.5;
            const double v = y + (sy + 0.5) / n_sub - 0.5;
            const Hit h = n_sub == 1 ? hit : cast_ray(spec.planes, poses[f], k, u, v);
            if (h.surface < 0) continue;
            const auto& tex = textures[static_cast<std::size_t>(h.surface)];
            sum += std::clamp(tex(h.world.x(), h.world.y()), 0.0, 1.0);
          }
        }
        frame.intensity(x, y) = sum / (n_sub * n_sub);
      }
    }
    seq.true_depth.push_back(frame.depth);
    seq.dynamic.emplace_back(k.width, k.height, 0);
    seq.frames.push_back(std::move(frame));
  }

  seq.truth.poses = poses;
  seq.truth.flow_into.resize(n);
  for (std::size_t f = 1; f < n; ++f) {
    FlowField flow(k.width, k.height);
    const Se3Pose camera_from_world = poses[f - 1].inverse();
    const Image<int>& prev_surface = surface[f - 1];
    for (int y = 0; y < k.height; ++y) {
      for (int x = 0; x < k.width; ++x) {
        const Hit& hit = hits[f][flow.dx.index(x, y)];
        const Vec3 pc = camera_from_world * hit.world;
        if (hit.surface < 0 || !(pc.z() > kDefaultZMin)) {
          flow.valid(x, y) = 0;
          continue;
        }
        const double u = k.fx * pc.x() / pc.z() + k.cx;
        const double v = k.fy * pc.y() / pc.z() + k.cy;
        flow.dx(x, y) = x - u;
        flow.dy(x, y) = y - v;
        // Reject static occlusions: every bilinear neighbour in the previous
        // frame must show the same surface.
        if (u >= 0.0 && v >= 0.0 && u <= k.width - 1 && v <= k.height - 1) {
          const int u0 = static_cast<int>(u);
          const int v0 = static_cast<int>(v);
          for (int dv = 0; dv < 2; ++dv) {
            for (int du = 0; du < 2; ++du) {
              const int uu = std::min(u0 + du, k.width - 1);
              const int vv = std::min(v0 + dv, k.height - 1);
              if (prev_surface(uu, vv) != hit.surface) flow.valid(x, y) = 0;
            }
          }
        }
      }
    }
    seq.truth.flow_into[f] = std::move(flow);
  }

  for (const Degradation& d : spec.degradations) apply_degradation(seq, d);
  return seq;
}

void apply_degradation(SyntheticSequence& seq, const Degradation& d) {
  const Region& r = d.region;
  switch (d.kind) {
    case DegradationKind::kSprite:
      apply_sprite(seq, d);
      return;
    case DegradationKind::kGainOffset:
      for (auto& frame : seq.frames) {
        if (!d.active(frame.index)) continue;
        for (int y = r.y; y < r.y + r.height; ++y) {
          for (int x = r.x; x < r.x + r.width; ++x) {
            frame.intensity(x, y) = std::clamp(d.magnitude * frame.intensity(x, y) + d.offset, 0.0, 1.0);
          }
        }
      }
      return;
    case DegradationKind::kHighlight:
      for (auto& frame : seq.frames) {
        if (!d.active(frame.index)) continue;
        const double cx = r.x + 0.5 * r.width + frame.index * d.motion.x();
        const double cy = r.y + 0.5 * r.height + frame.index * d.motion.y();
        const double sigma = 0.25 * std::min(r.width, r.height);
        for (int y = 0; y < frame.intensity.height(); ++y) {
          for (int x = 0; x < frame.intensity.width(); ++x) {
            const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            const double add = d.magnitude * std::exp(-r2 / (2.0 * sigma * sigma));
            frame.intensity(x, y) = std::min(1.0, frame.intensity(x, y) + add);
          }
        }
      }
      return;
    case DegradationKind::kDepthHoles:
      for (auto& frame : seq.frames) {
        if (!d.active(frame.index)) continue;
        for (int y = r.y; y < r.y + r.height; ++y) {
          for (int x = r.x; x < r.x + r.width; ++x) frame.depth(x, y) = 0.0;
        }
      }
      return;
    case DegradationKind::kDepthNoise:
      for (auto& frame : seq.frames) {
        if (!d.active(frame.index)) continue;
        std::mt19937_64 rng(mix(d.seed, static_cast<std::uint64_t>(frame.index)));
        std::normal_distribution<double> noise(0.0, d.magnitude);
        for (int y = r.y; y < r.y + r.height; ++y) {
          for (int x = r.x; x < r.x + r.width; ++x) {
            if (frame.depth(x, y) > 0.0) frame.depth(x, y) *= std::max(0.05, 1.0 + noise(rng));
          }
        }
      }
      return;
  }
}

namespace {

std::map<std::string, std::string> named_fields(const std::string& text, const std::string& what) {
  std::map<std::string, std::string> fields;
  std::istringstream in(text);
  std::string tok;
  bool first = true;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      if (first && what == "degradation") {
        fields["kind"] = tok;
        first = false;
        continue;
      }
      throw Error(ErrorKind::kValidation, what + ": expected name=value, got '" + tok + "'");
    }
    fields[tok.substr(0, eq)] = tok.substr(eq + 1);
    first = false;
  }
  return fields;
}

std::vector<double> numbers(const std::string& text, std::size_t count, const std::string& what) {
  std::vector<double> out;
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    double v = 0.0;
    if (!parse_number(tok, v)) throw Error(ErrorKind::kValidation, what + ": bad number '" + tok + "'");
    out.push_back(v);
  }
  if (out.size() != count) {
    throw Error(ErrorKind::kValidation,
                what + ": expected " + std::to_string(count) + " values, got '" + text + "'");
  }
  return out;
}

double number(const std::string& text, const std::string& what) {
  return numbers(text, 1, what)[0];
}

}  // namespace

SceneSpec parse_scene_spec(const KeyValueConfig& cfg) {
  cfg.reject_unknown({"width", "height", "fx", "fy", "cx", "cy", "frames", "fps", "seed", "supersample",
                      "trajectory", "trajectory.velocity", "trajectory.amplitude",
                      "trajectory.period", "pose", "plane", "degradation"});
  SceneSpec spec;
  spec.intrinsics.width = static_cast<int>(cfg.get_int("width", 160));
  spec.intrinsics.height = static_cast<int>(cfg.get_int("height", 120));
  spec.intrinsics.fx = cfg.get_double("fx", spec.intrinsics.width);
  spec.intrinsics.fy = cfg.get_double("fy", spec.intrinsics.fx);
  spec.intrinsics.cx = cfg.get_double("cx", 0.5 * spec.intrinsics.width - 0.5);
  spec.intrinsics.cy = cfg.get_double("cy", 0.5 * spec.intrinsics.height - 0.5);
  spec.frame_count = static_cast<int>(cfg.get_int("frames", 30));
  spec.fps = cfg.get_double("fps", 30.0);
  spec.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  spec.supersample = static_cast<int>(cfg.get_int("supersample", spec.supersample));

  const std::string kind = cfg.get_string("trajectory", "static");
  auto& traj = spec.trajectory;
  if (kind == "static") {
    traj.kind = TrajectoryKind::kStatic;
  } else if (kind == "linear") {
    traj.kind = TrajectoryKind::kLinear;
    const auto v = numbers(cfg.get_string("trajectory.velocity", "0 0 0 0 0 0"), 6, "trajectory.velocity");
    traj.velocity = Twist::from_vector(Eigen::Map<const Vec6>(v.data()));
  } else if (kind == "smooth") {
    traj.kind = TrajectoryKind::kSmooth;
    const auto a = numbers(cfg.get_string("trajectory.amplitude", "0 0 0 0 0 0"), 6, "trajectory.amplitude");
    traj.amplitude = Eigen::Map<const Vec6>(a.data());
    traj.period = cfg.get_double("trajectory.period", 40.0);
  } else if (kind == "explicit") {
    traj.kind = TrajectoryKind::kExplicit;
    for (const auto& line : cfg.get_all("pose")) {
      const auto v = numbers(line, 7, "pose");
      Eigen::Quaterniond q(v[6], v[3], v[4], v[5]);
      if (q.norm() < 1e-9) throw Error(ErrorKind::kValidation, "pose: zero quaternion");
      traj.poses.emplace_back(q.normalized().toRotationMatrix(), Vec3(v[0], v[1], v[2]));
    }
  } else {
    throw Error(ErrorKind::kValidation, "unknown trajectory kind '" + kind + "'");
  }

  for (const auto& line : cfg.get_all("plane")) {
    TexturedPlane p;
    for (const auto& [name, value] : named_fields(line, "plane")) {
      if (name == "depth") p.depth = number(value, "plane.depth");
      else if (name == "extent") {
        const auto e = numbers(value, 4, "plane.extent");
        p.x_min = e[0];
        p.x_max = e[1];
        p.y_min = e[2];
        p.y_max = e[3];
      } else if (name == "mean") p.mean = number(value, "plane.mean");
      else if (name == "contrast") p.contrast = number(value, "plane.contrast");
      else if (name == "wavelength") p.wavelength_px = number(value, "plane.wavelength");
      else if (name == "sharpness") p.sharpness = number(value, "plane.sharpness");
      else throw Error(ErrorKind::kValidation, "plane: unknown field '" + name + "'");
    }
    spec.planes.push_back(p);
  }

  for (const auto& line : cfg.get_all("degradation")) {
    Degradation d;
    const auto fields = named_fields(line, "degradation");
    const auto kind_it = fields.find("kind");
    if (kind_it == fields.end()) throw Error(ErrorKind::kValidation, "degradation: missing kind");
    const std::string& k = kind_it->second;
    if (k == "sprite") d.kind = DegradationKind::kSprite;
    else if (k == "gain_offset") d.kind = DegradationKind::kGainOffset;
    else if (k == "highlight") d.kind = DegradationKind::kHighlight;
    else if (k == "depth_holes") d.kind = DegradationKind::kDepthHoles;
    else if (k == "depth_noise") d.kind = DegradationKind::kDepthNoise;
    else throw Error(ErrorKind::kValidation, "degradation: unknown kind '" + k + "'");
    d.region = {0, 0, spec.intrinsics.width, spec.intrinsics.height};
    d.seed = spec.seed;
    for (const auto& [name, value] : fields) {
      if (name == "kind") continue;
      if (name == "region") {
        const auto r = numbers(value, 4, "degradation.region");
        d.region = {static_cast<int>(r[0]), static_cast<int>(r[1]), static_cast<int>(r[2]),
                    static_cast<int>(r[3])};
      } else if (name == "magnitude") d.magnitude = number(value, "degradation.magnitude");
      else if (name == "offset") d.offset = number(value, "degradation.offset");
      else if (name == "motion") {
        const auto m = numbers(value, 2, "degradation.motion");
        d.motion = {m[0], m[1]};
      } else if (name == "depth") d.depth = number(value, "degradation.depth");
      else if (name == "depth_rate") d.depth_rate = number(value, "degradation.depth_rate");
      else if (name == "flicker") d.flicker = number(value, "degradation.flicker");
      else if (name == "wavelength") d.wavelength_px = number(value, "degradation.wavelength");
      else if (name == "frames") {
        const auto colon = value.find(':');
        if (colon == std::string::npos) throw Error(ErrorKind::kValidation, "degradation.frames: expected first:last");
        d.first_frame = static_cast<int>(number(value.substr(0, colon), "degradation.frames"));
        d.last_frame = static_cast<int>(number(value.substr(colon + 1), "degradation.frames"));
      } else if (name == "seed") d.seed = static_cast<std::uint64_t>(number(value, "degradation.seed"));
      else throw Error(ErrorKind::kValidation, "degradation: unknown field '" + name + "'");
    }
    spec.degradations.push_back(d);
  }
  return spec;
}

}  // namespace cwvo
