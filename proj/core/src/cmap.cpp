#include "cwvo/cmap.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <vector>

namespace cwvo {
namespace {

constexpr std::uint16_t kVersion = 1;
constexpr std::uint8_t kChannels = 2;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_plane_file(const std::filesystem::path& path, const std::array<char, 4>& magic,
                      const ImageD& first, const ImageD& second) {
  require_same_shape(first, second, "plane file: planes differ in size");
  std::vector<unsigned char> bytes;
  bytes.reserve(kPlaneFileHeaderSize + 8 * first.size());
  for (char c : magic) bytes.push_back(static_cast<unsigned char>(c));
  bytes.push_back(static_cast<unsigned char>(kVersion & 0xFFu));
  bytes.push_back(static_cast<unsigned char>(kVersion >> 8));
  put_u32(bytes, static_cast<std::uint32_t>(first.width()));
  put_u32(bytes, static_cast<std::uint32_t>(first.height()));
  bytes.push_back(kChannels);
  bytes.insert(bytes.end(), 5, 0);
  for (const ImageD* plane : {&first, &second}) {
    for (double v : plane->pixels()) {
      put_u32(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

PlanePair read_plane_file(const std::filesystem::path& path, const std::array<char, 4>& magic) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(f),
                                         std::istreambuf_iterator<char>()};
  const std::string where = path.string();
  if (bytes.size() < kPlaneFileHeaderSize) throw Error(ErrorKind::kParse, where + ": truncated header");
  for (std::size_t i = 0; i < 4; ++i) {
    if (bytes[i] != static_cast<unsigned char>(magic[i])) {
      throw Error(ErrorKind::kParse, where + ": bad magic");
    }
  }
  const auto version = static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != kVersion) throw Error(ErrorKind::kParse, where + ": unsupported version");
  const std::uint32_t width = get_u32(&bytes[6]);
  const std::uint32_t height = get_u32(&bytes[10]);
  if (bytes[14] != kChannels) throw Error(ErrorKind::kParse, where + ": channel count must be 2");
  for (std::size_t i = 15; i < kPlaneFileHeaderSize; ++i) {
    if (bytes[i] != 0) throw Error(ErrorKind::kParse, where + ": reserved bytes not zero");
  }
  if (width > (1u << 16) || height > (1u << 16)) throw Error(ErrorKind::kParse, where + ": implausible size");
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (bytes.size() != kPlaneFileHeaderSize + 8 * n) {
    throw Error(ErrorKind::kParse, where + ": payload size does not match header");
  }
  PlanePair out{ImageD(static_cast<int>(width), static_cast<int>(height)),
                ImageD(static_cast<int>(width), static_cast<int>(height))};
  const unsigned char* p = bytes.data() + kPlaneFileHeaderSize;
  for (ImageD* plane : {&out.first, &out.second}) {
    for (std::size_t i = 0; i < n; ++i, p += 4) {
      (*plane)[i] = static_cast<double>(std::bit_cast<float>(get_u32(p)));
    }
  }
  return out;
}

std::string cmap_filename(int frame_j, int frame_i) {
  return std::to_string(frame_j) + "_" + std::to_string(frame_i) + ".cmap";
}

void write_flow(const std::filesystem::path& path, const FlowField& flow) {
  ImageD dx = flow.dx;
  ImageD dy = flow.dy;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (!flow.valid[i]) {
      dx[i] = nan;
      dy[i] = nan;
    }
  }
  write_plane_file(path, kFlowMagic, dx, dy);
}

FlowField read_flow(const std::filesystem::path& path) {
  PlanePair planes = read_plane_file(path, kFlowMagic);
  FlowField flow;
  flow.dx = std::move(planes.first);
  flow.dy = std::move(planes.second);
  flow.valid = Mask(flow.dx.width(), flow.dx.height(), 1);
  for (std::size_t i = 0; i < flow.dx.size(); ++i) {
    if (!std::isfinite(flow.dx[i]) || !std::isfinite(flow.dy[i])) {
      flow.valid[i] = 0;
      flow.dx[i] = 0.0;
      flow.dy[i] = 0.0;
    }
  }
  return flow;
}

}  // namespace cwvo
