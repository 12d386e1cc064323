#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "brickstart/error.hpp"

namespace brickstart {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster, rows top to bottom, channels interleaved.
class RawImage {
 public:
  RawImage() = default;
  RawImage(int width, int height, Rgb fill = {0, 0, 0}) : width_(width), height_(height) {
    check_dims(width, height);
    pixels_.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
      pixels_[i] = fill[0];
      pixels_[i + 1] = fill[1];
      pixels_[i + 2] = fill[2];
    }
  }
  RawImage(int width, int height, std::vector<std::uint8_t> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dims(width, height);
    if (pixels_.size() != static_cast<std::size_t>(width) * height * 3) {
      throw Error(ErrorCode::InvalidArgument, "image", "pixel buffer does not match width x height x 3");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }
  const std::vector<std::uint8_t>& pixels() const { return pixels_; }
  std::vector<std::uint8_t>& pixels() { return pixels_; }

  Rgb at(int x, int y) const {
    const std::size_t i = offset(x, y);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = offset(x, y);
    pixels_[i] = c[0];
    pixels_[i + 1] = c[1];
    pixels_[i + 2] = c[2];
  }

  bool operator==(const RawImage&) const = default;

 private:
  static void check_dims(int w, int h) {
    if (w < 1 || h < 1) throw Error(ErrorCode::InvalidArgument, "image", "image dimensions must be positive");
  }
  std::size_t offset(int x, int y) const { return (static_cast<std::size_t>(y) * width_ + x) * 3; }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// One byte per pixel, 0 or 1.
struct BinaryRaster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  BinaryRaster() = default;
  BinaryRaster(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : data) n += v != 0;
    return n;
  }
  bool operator==(const BinaryRaster&) const = default;
};

struct PixelRect {
  int x = 0, y = 0, width = 0, height = 0;
  bool operator==(const PixelRect&) const = default;
};

}  // namespace brickstart
