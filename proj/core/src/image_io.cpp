#include "cwvo/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "cwvo/geometry.hpp"

namespace cwvo {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return f;
}

int read_header_int(std::istream& in, const std::string& where) {
  int c = in.peek();
  while (c != EOF) {
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else {
      break;
    }
    c = in.peek();
  }
  int v = -1;
  if (!(in >> v) || v < 0) throw Error(ErrorKind::kParse, where + ": bad PGM header");
  return v;
}

}  // namespace

RawImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  const std::string where = path.string();
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') {
    throw Error(ErrorKind::kParse, where + ": not a binary PGM (P5)");
  }
  RawImage img;
  img.width = read_header_int(in, where);
  img.height = read_header_int(in, where);
  img.max_value = read_header_int(in, where);
  if (img.max_value < 1 || img.max_value > 65535) {
    throw Error(ErrorKind::kParse, where + ": bad PGM maxval");
  }
  in.get();  // single whitespace before raster
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  const std::size_t bytes_per = img.max_value > 255 ? 2 : 1;
  std::vector<unsigned char> raster(n * bytes_per);
  in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (static_cast<std::size_t>(in.gcount()) != raster.size()) {
    throw Error(ErrorKind::kParse, where + ": truncated PGM raster");
  }
  img.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    img.samples[i] = bytes_per == 2
                         ? static_cast<std::uint16_t>((raster[2 * i] << 8) | raster[2 * i + 1])
                         : raster[i];
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const RawImage& image) {
  if (image.channels != 1) throw Error(ErrorKind::kInvalidArgument, "PGM is single-channel");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "P5\n" << image.width << " " << image.height << "\n" << image.max_value << "\n";
  std::vector<unsigned char> raster;
  const bool wide = image.max_value > 255;
  raster.reserve(image.samples.size() * (wide ? 2 : 1));
  for (std::uint16_t v : image.samples) {
    if (wide) raster.push_back(static_cast<unsigned char>(v >> 8));
    raster.push_back(static_cast<unsigned char>(v & 0xFF));
  }
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

RawImage read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  const std::string where = path.string();
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorKind::kIo, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorKind::kIo, "libpng init failed");
  }
  RawImage img;
  std::vector<png_bytep> rows;
  std::vector<unsigned char> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::kParse, where + ": corrupt PNG");
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = png_get_channels(png, info);
  const int depth = png_get_bit_depth(png, info);
  img.max_value = depth == 16 ? 65535 : 255;
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * static_cast<std::size_t>(img.height));
  rows.resize(static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) rows[static_cast<std::size_t>(y)] = &buffer[row_bytes * y];
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (img.channels != 1 && img.channels != 3) {
    throw Error(ErrorKind::kParse, where + ": unsupported channel count");
  }
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
  img.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    img.samples[i] = depth == 16
                         ? static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1])
                         : buffer[i];
  }
  return img;
}

void write_png(const std::filesystem::path& path, const RawImage& image) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorKind::kIo, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::kIo, "libpng init failed");
  }
  const bool wide = image.max_value > 255;
  const std::size_t row_bytes =
      static_cast<std::size_t>(image.width) * image.channels * (wide ? 2 : 1);
  std::vector<unsigned char> buffer(row_bytes * static_cast<std::size_t>(image.height));
  for (std::size_t i = 0; i < image.samples.size(); ++i) {
    if (wide) {
      buffer[2 * i] = static_cast<unsigned char>(image.samples[i] >> 8);
      buffer[2 * i + 1] = static_cast<unsigned char>(image.samples[i] & 0xFF);
    } else {
      buffer[i] = static_cast<unsigned char>(image.samples[i]);
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) rows[static_cast<std::size_t>(y)] = &buffer[row_bytes * y];
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::kIo, "PNG write failed for " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), wide ? 16 : 8,
               image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

RawImage read_image(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".pgm") return read_pgm(path);
  if (ext == ".png") return read_png(path);
  throw Error(ErrorKind::kIo, path.string() + ": unsupported image format");
}

ImageD to_intensity(const RawImage& raw) {
  ImageD out(raw.width, raw.height);
  const double scale = 1.0 / raw.max_value;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (raw.channels == 3) {
      out[i] = luma(raw.samples[3 * i] * scale, raw.samples[3 * i + 1] * scale,
                    raw.samples[3 * i + 2] * scale);
    } else {
      out[i] = raw.samples[i] * scale;
    }
  }
  return out;
}

ImageD to_depth(const RawImage& raw, double scale) {
  if (raw.channels != 1) throw Error(ErrorKind::kInvalidArgument, "depth image must be single-channel");
  ImageD out(raw.width, raw.height);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = raw.samples[i] / scale;
  return out;
}

RawImage quantize_unit(const ImageD& values) {
  RawImage raw{values.width(), values.height(), 1, 65535, {}};
  raw.samples.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    raw.samples[i] =
        static_cast<std::uint16_t>(std::lround(std::clamp(values[i], 0.0, 1.0) * 65535.0));
  }
  return raw;
}

RawImage quantize_depth(const ImageD& depth, double scale) {
  RawImage raw{depth.width(), depth.height(), 1, 65535, {}};
  raw.samples.resize(depth.size());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double units = depth[i] * scale;
    raw.samples[i] = (units > 0.0 && units < 65535.5 && std::isfinite(units))
                         ? static_cast<std::uint16_t>(std::lround(units))
                         : std::uint16_t{0};
  }
  return raw;
}

}  // namespace cwvo
