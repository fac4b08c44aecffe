#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "cwvo/consistency.hpp"
#include "cwvo/image.hpp"

namespace cwvo {

// Two-plane float32 little-endian container:
//   magic[4] | version u16 = 1 | width u32 | height u32 | channels u8 = 2 | 5 zero bytes
// followed by two row-major planes.
inline constexpr std::array<char, 4> kCmapMagic{'C', 'M', 'A', 'P'};
inline constexpr std::array<char, 4> kFlowMagic{'F', 'L', 'O', 'W'};
inline constexpr std::size_t kPlaneFileHeaderSize = 20;

struct PlanePair {
  ImageD first;
  ImageD second;
};

void write_plane_file(const std::filesystem::path& path, const std::array<char, 4>& magic,
                      const ImageD& first, const ImageD& second);
PlanePair read_plane_file(const std::filesystem::path& path, const std::array<char, 4>& magic);

/// ".cmap": plane 0 = photometric log-covariance, plane 1 = geometric.
inline void write_cmap(const std::filesystem::path& path, const ImageD& log_photo,
                       const ImageD& log_geo) {
  write_plane_file(path, kCmapMagic, log_photo, log_geo);
}
inline PlanePair read_cmap(const std::filesystem::path& path) {
  return read_plane_file(path, kCmapMagic);
}

/// "<frame_j>_<frame_i>.cmap"
std::string cmap_filename(int frame_j, int frame_i);

/// Flow files encode invalid pixels as NaN in both planes.
void write_flow(const std::filesystem::path& path, const FlowField& flow);
FlowField read_flow(const std::filesystem::path& path);

}  // namespace cwvo
