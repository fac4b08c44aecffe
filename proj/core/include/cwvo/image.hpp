#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cwvo/error.hpp"

namespace cwvo {

/// Dense row-major single-channel image.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(checked_size(width, height), fill) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool same_shape(const auto& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 0 || height < 0) {
      throw Error(ErrorKind::kShape, "negative image dimensions");
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ImageD = Image<double>;
using Mask = Image<std::uint8_t>;

inline void require_same_shape(const auto& a, const auto& b, const std::string& what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::kShape, what);
  }
}

}  // namespace cwvo
