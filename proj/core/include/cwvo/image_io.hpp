#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cwvo/image.hpp"

namespace cwvo {

/// Interleaved integer samples as stored on disk (1 or 3 channels).
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  int max_value = 255;
  std::vector<std::uint16_t> samples;
};

RawImage read_pgm(const std::filesystem::path& path);
/// Binary P5; 16-bit when max_value > 255 (big-endian samples).
void write_pgm(const std::filesystem::path& path, const RawImage& image);

RawImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RawImage& image);

/// Dispatches on extension (.pgm / .png).
RawImage read_image(const std::filesystem::path& path);

/// Samples scaled to [0, 1]; three-channel input goes through luma.
ImageD to_intensity(const RawImage& raw);
/// Samples divided by `scale` (units per metre); zero stays zero (missing).
ImageD to_depth(const RawImage& raw, double scale);

/// Quantises [0, 1] values onto a 16-bit single-channel image.
RawImage quantize_unit(const ImageD& values);
/// Quantises metres onto 16-bit depth units; out-of-range depth becomes 0.
RawImage quantize_depth(const ImageD& depth, double scale);

}  // namespace cwvo
