#pragma once

// Scan pipeline parameters and their key = value text form.

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "brickstart/error.hpp"
#include "brickstart/grid.hpp"

namespace brickstart {

struct PipelineConfig {
  int target_width = 300;
  int target_height = 255;
  double blur_sigma = 1.0;
  double meanshift_spatial_radius = 10.0;
  double meanshift_color_radius = 25.0;
  int meanshift_max_iterations = 10;
  double canny_low = 50.0;
  double canny_high = 150.0;
  int white_threshold = 200;
  double occupancy_threshold = 0.5;
  /// Brightest channel at or above this counts as model, below as backdrop.
  int foreground_threshold = 60;
  /// Bright regions with fewer pixels than this (working resolution) are
  /// dropped as specks. Small real parts must survive so the disconnection
  /// check can see them.
  int foreground_min_area = 20;
  bool graphcut = false;
  int graphcut_iterations = 3;
  CellDimensions cell;

  void validate() const {
    auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, "config", msg); };
    if (target_width < 8 || target_height < 8) bad("target dimensions must be at least 8");
    if (!(blur_sigma >= 0.0)) bad("blur_sigma must be non-negative");
    if (!(meanshift_spatial_radius > 0.0) || !(meanshift_color_radius > 0.0)) bad("mean-shift radii must be positive");
    if (meanshift_max_iterations < 1) bad("meanshift_max_iterations must be at least 1");
    if (!(canny_low >= 0.0) || !(canny_low < canny_high)) bad("canny_low must be below canny_high");
    if (white_threshold < 0 || white_threshold > 255) bad("white_threshold must be 0..255");
    if (!(occupancy_threshold > 0.0 && occupancy_threshold <= 1.0)) bad("occupancy_threshold must be in (0, 1]");
    if (foreground_threshold < 1 || foreground_threshold > 255) bad("foreground_threshold must be 1..255");
    if (foreground_min_area < 0) bad("foreground_min_area must be non-negative");
    if (graphcut_iterations < 1) bad("graphcut_iterations must be at least 1");
    if (!cell.valid()) bad("cell dimensions must be positive");
  }

  bool operator==(const PipelineConfig&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Sets one field by name; values are plain numbers or true/false.
inline void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  value = detail::trim(value);
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::ParseError, "config", std::string(key) + ": " + why);
  };
  auto as_double = [&]() {
    double v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size() || !std::isfinite(v)) fail("expected a number");
    return v;
  };
  auto as_int = [&]() {
    int v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) fail("expected an integer");
    return v;
  };
  auto as_bool = [&]() {
    if (value == "true") return true;
    if (value == "false") return false;
    fail("expected true or false");
    return false;
  };
  if (key == "target_width") cfg.target_width = as_int();
  else if (key == "target_height") cfg.target_height = as_int();
  else if (key == "blur_sigma") cfg.blur_sigma = as_double();
  else if (key == "meanshift_spatial_radius") cfg.meanshift_spatial_radius = as_double();
  else if (key == "meanshift_color_radius") cfg.meanshift_color_radius = as_double();
  else if (key == "meanshift_max_iterations") cfg.meanshift_max_iterations = as_int();
  else if (key == "canny_low") cfg.canny_low = as_double();
  else if (key == "canny_high") cfg.canny_high = as_double();
  else if (key == "white_threshold") cfg.white_threshold = as_int();
  else if (key == "occupancy_threshold") cfg.occupancy_threshold = as_double();
  else if (key == "foreground_threshold") cfg.foreground_threshold = as_int();
  else if (key == "foreground_min_area") cfg.foreground_min_area = as_int();
  else if (key == "graphcut") cfg.graphcut = as_bool();
  else if (key == "graphcut_iterations") cfg.graphcut_iterations = as_int();
  else if (key == "cell_width_mm") cfg.cell.width_mm = as_double();
  else if (key == "cell_depth_mm") cfg.cell.depth_mm = as_double();
  else if (key == "cell_height_mm") cfg.cell.height_mm = as_double();
  else throw Error(ErrorCode::ParseError, "config", "unknown key '" + std::string(key) + "'");
}

/// Parses "key = value" lines on top of `base`. '#' starts a comment.
inline PipelineConfig parse_config(std::string_view text, PipelineConfig base = {}) {
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "config", "line " + std::to_string(line_no) + ": expected key = value");
    }
    set_config_value(base, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  base.validate();
  return base;
}

inline std::string to_text(const PipelineConfig& c) {
  auto num = [](double v) {
    std::string s = std::to_string(v);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
  };
  std::string out;
  out += "target_width = " + std::to_string(c.target_width) + "\n";
  out += "target_height = " + std::to_string(c.target_height) + "\n";
  out += "blur_sigma = " + num(c.blur_sigma) + "\n";
  out += "meanshift_spatial_radius = " + num(c.meanshift_spatial_radius) + "\n";
  out += "meanshift_color_radius = " + num(c.meanshift_color_radius) + "\n";
  out += "meanshift_max_iterations = " + std::to_string(c.meanshift_max_iterations) + "\n";
  out += "canny_low = " + num(c.canny_low) + "\n";
  out += "canny_high = " + num(c.canny_high) + "\n";
  out += "white_threshold = " + std::to_string(c.white_threshold) + "\n";
  out += "occupancy_threshold = " + num(c.occupancy_threshold) + "\n";
  out += "foreground_threshold = " + std::to_string(c.foreground_threshold) + "\n";
  out += "foreground_min_area = " + std::to_string(c.foreground_min_area) + "\n";
  out += std::string("graphcut = ") + (c.graphcut ? "true" : "false") + "\n";
  out += "graphcut_iterations = " + std::to_string(c.graphcut_iterations) + "\n";
  out += "cell_width_mm = " + num(c.cell.width_mm) + "\n";
  out += "cell_depth_mm = " + num(c.cell.depth_mm) + "\n";
  out += "cell_height_mm = " + num(c.cell.height_mm) + "\n";
  return out;
}

}  // namespace brickstart
