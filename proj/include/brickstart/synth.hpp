#pragma once

// Synthetic profile photographs: coloured cells on a black backdrop, one
// white reference cell, optional Gaussian sensor noise. Used as the ground
// truth source for scan tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "brickstart/error.hpp"
#include "brickstart/grid.hpp"
#include "brickstart/image.hpp"

namespace brickstart {

struct SynthParams {
  std::uint64_t seed = 1;
  double noise_sigma = 0.0;  // 8-bit units
  int px_per_cell_x = 14;
  int px_per_cell_y = 11;
  /// Output aspect ratio; the canvas is padded with black to match it.
  int aspect_width = 300;
  int aspect_height = 255;
};

struct SynthTruth {
  BrickBitmask mask{1, 1};
  int white_col = 0, white_row = 0;
  int px_per_cell_x = 0, px_per_cell_y = 0;
  int origin_x = 0, origin_y = 0;  // pixel of the grid's top-left corner
  BinaryRaster silhouette;
};

struct SynthRender {
  RawImage image;
  SynthTruth truth;
};

/// Brick colours: saturated, never close to white or black.
inline constexpr std::array<Rgb, 6> kBrickPalette{{
    {201, 26, 9},    // red
    {0, 85, 191},    // blue
    {242, 205, 55},  // yellow
    {35, 120, 65},   // green
    {254, 138, 24},  // orange
    {129, 0, 123},   // magenta
}};

inline SynthRender synth_render(const BrickBitmask& mask, const SynthParams& p) {
  if (mask.empty()) throw Error(ErrorCode::InvalidArgument, "synth", "mask has no filled cells");
  if (p.px_per_cell_x < 1 || p.px_per_cell_y < 1) {
    throw Error(ErrorCode::InvalidArgument, "synth", "pixels per cell must be positive");
  }
  if (!(p.noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "synth", "noise must be non-negative");
  if (p.aspect_width < 1 || p.aspect_height < 1) throw Error(ErrorCode::InvalidArgument, "synth", "bad aspect");

  const int cw = (mask.cols() + 2) * p.px_per_cell_x;
  const int ch = (mask.rows() + 2) * p.px_per_cell_y;
  int w = cw, h = ch;
  const long long aw = p.aspect_width, ah = p.aspect_height;
  if (cw * ah > ch * aw) {
    h = static_cast<int>((cw * ah + aw - 1) / aw);
  } else {
    w = static_cast<int>((ch * aw + ah - 1) / ah);
  }

  SynthRender out{RawImage(w, h), {}};
  SynthTruth& t = out.truth;
  t.mask = mask;
  t.px_per_cell_x = p.px_per_cell_x;
  t.px_per_cell_y = p.px_per_cell_y;
  t.origin_x = (w - cw) / 2 + p.px_per_cell_x;
  t.origin_y = (h - ch) / 2 + p.px_per_cell_y;
  t.silhouette = BinaryRaster(w, h);

  std::mt19937_64 rng(p.seed);
  std::vector<std::pair<int, int>> filled;
  for (int r = 0; r < mask.rows(); ++r)
    for (int c = 0; c < mask.cols(); ++c)
      if (mask.at(c, r)) filled.emplace_back(c, r);
  const auto pick = std::uniform_int_distribution<std::size_t>(0, filled.size() - 1)(rng);
  t.white_col = filled[pick].first;
  t.white_row = filled[pick].second;

  std::uniform_int_distribution<std::size_t> colour(0, kBrickPalette.size() - 1);
  for (const auto& [c, r] : filled) {
    const Rgb col = (c == t.white_col && r == t.white_row) ? Rgb{255, 255, 255} : kBrickPalette[colour(rng)];
    const int x0 = t.origin_x + c * p.px_per_cell_x, y0 = t.origin_y + r * p.px_per_cell_y;
    for (int y = y0; y < y0 + p.px_per_cell_y; ++y) {
      for (int x = x0; x < x0 + p.px_per_cell_x; ++x) {
        out.image.set(x, y, col);
        t.silhouette.set(x, y, true);
      }
    }
  }

  if (p.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, p.noise_sigma);
    for (auto& v : out.image.pixels()) {
      v = static_cast<std::uint8_t>(std::clamp(std::lround(v + noise(rng)), 0L, 255L));
    }
  }
  return out;
}

}  // namespace brickstart
