#pragma once

// Photo -> brick bitmask. Stages: preprocess, colour quantization, edges,
// foreground, reference brick, grid rasterization. Every stage is a pure
// function of its inputs and raises errors tagged with its own name.
//
// Needs OpenCV (core, imgproc, imgcodecs); link brickstart_vision.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "brickstart/error.hpp"
#include "brickstart/grid.hpp"
#include "brickstart/image.hpp"
#include "brickstart/pipeline_config.hpp"

namespace brickstart {

// --- OpenCV bridging and file I/O ------------------------------------------

namespace detail {

inline cv::Mat to_bgr(const RawImage& img) {
  cv::Mat rgb(img.height(), img.width(), CV_8UC3, const_cast<std::uint8_t*>(img.pixels().data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

inline RawImage from_bgr(const cv::Mat& bgr) {
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  if (!rgb.isContinuous()) rgb = rgb.clone();
  return RawImage(rgb.cols, rgb.rows, std::vector<std::uint8_t>(rgb.data, rgb.data + rgb.total() * 3));
}

inline cv::Mat to_mat(const BinaryRaster& r) {
  cv::Mat m(r.height, r.width, CV_8UC1);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x) m.at<std::uint8_t>(y, x) = r.at(x, y) ? 255 : 0;
  return m;
}

inline BinaryRaster from_mat(const cv::Mat& m) {
  BinaryRaster r(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y)
    for (int x = 0; x < m.cols; ++x) r.set(x, y, m.at<std::uint8_t>(y, x) != 0);
  return r;
}

inline RawImage decoded_or_throw(const cv::Mat& bgr, const std::string& what, ErrorCode code) {
  if (bgr.empty()) throw Error(code, "decode", "cannot decode image " + what);
  return from_bgr(bgr);
}

}  // namespace detail

/// PNG or JPEG from disk.
inline RawImage read_image(const std::string& path) {
  return detail::decoded_or_throw(cv::imread(path, cv::IMREAD_COLOR), "'" + path + "'", ErrorCode::IoError);
}

/// PNG or JPEG from memory (uploads).
inline RawImage decode_image(const std::string& bytes) {
  if (bytes.empty()) throw Error(ErrorCode::ParseError, "decode", "empty image upload");
  const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<char*>(bytes.data()));
  return detail::decoded_or_throw(cv::imdecode(buf, cv::IMREAD_COLOR), "upload", ErrorCode::ParseError);
}

inline std::string encode_png(const RawImage& img) {
  std::vector<std::uint8_t> buf;
  if (!cv::imencode(".png", detail::to_bgr(img), buf)) throw Error(ErrorCode::IoError, "encode", "PNG encoding failed");
  return std::string(buf.begin(), buf.end());
}

inline RawImage raster_image(const BinaryRaster& r) {
  RawImage out(r.width, r.height);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      if (r.at(x, y)) out.set(x, y, {255, 255, 255});
  return out;
}

/// Format follows the extension (.png, .jpg, ...).
inline void write_image(const RawImage& img, const std::string& path) {
  bool ok = false;
  try {
    ok = cv::imwrite(path, detail::to_bgr(img));
  } catch (const cv::Exception&) {
  }
  if (!ok) throw Error(ErrorCode::IoError, "encode", "cannot write '" + path + "'");
}

// --- preprocess ---------------------------------------------------------------

/// Centred crop to the target aspect ratio (integer pixel box).
inline PixelRect aspect_crop(int width, int height, int target_w, int target_h) {
  PixelRect r{0, 0, width, height};
  const long long lhs = static_cast<long long>(width) * target_h, rhs = static_cast<long long>(height) * target_w;
  if (lhs > rhs) {
    r.width = std::max(1, static_cast<int>(std::lround(static_cast<double>(height) * target_w / target_h)));
    r.x = (width - r.width) / 2;
  } else if (lhs < rhs) {
    r.height = std::max(1, static_cast<int>(std::lround(static_cast<double>(width) * target_h / target_w)));
    r.y = (height - r.height) / 2;
  }
  return r;
}

/// Crop to aspect, bilinear resample to the working size, Gaussian blur.
inline RawImage preprocess(const RawImage& img, const PipelineConfig& cfg) {
  cfg.validate();
  if (img.width() < 8 || img.height() < 8) {
    throw Error(ErrorCode::InvalidArgument, "preprocess",
                "image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) + " is smaller than 8x8");
  }
  const PixelRect crop = aspect_crop(img.width(), img.height(), cfg.target_width, cfg.target_height);
  cv::Mat src = detail::to_bgr(img)(cv::Rect(crop.x, crop.y, crop.width, crop.height));
  cv::Mat work;
  if (crop.width == cfg.target_width && crop.height == cfg.target_height) {
    work = src.clone();
  } else {
    cv::resize(src, work, cv::Size(cfg.target_width, cfg.target_height), 0, 0, cv::INTER_LINEAR);
  }
  if (cfg.blur_sigma > 0.0) cv::GaussianBlur(work, work, cv::Size(0, 0), cfg.blur_sigma, cfg.blur_sigma);
  return detail::from_bgr(work);
}

// --- colour quantization ----------------------------------------------------

/// Mean-shift filtering, then the filtered colours are grouped into modes
/// (within half the colour radius). Modes that never fill a 5x5 block are
/// thin seams between regions and are folded into the nearest solid mode.
/// Each mode is painted with the most frequent input colour among its
/// pixels, so the output palette is a subset of the input palette.
inline RawImage quantize_colors(const RawImage& img, const PipelineConfig& cfg) {
  cfg.validate();
  const int w = img.width(), h = img.height();
  cv::Mat filtered;
  cv::pyrMeanShiftFiltering(detail::to_bgr(img), filtered, cfg.meanshift_spatial_radius, cfg.meanshift_color_radius, 0,
                            cv::TermCriteria(cv::TermCriteria::MAX_ITER + cv::TermCriteria::EPS,
                                             cfg.meanshift_max_iterations, 1.0));
  auto pack = [](int b, int g, int r) { return static_cast<std::uint32_t>(r << 16 | g << 8 | b); };
  std::vector<std::uint32_t> ms(static_cast<std::size_t>(w) * h);
  std::map<std::uint32_t, std::size_t> freq;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto& p = filtered.at<cv::Vec3b>(y, x);
      const auto c = pack(p[0], p[1], p[2]);
      ms[static_cast<std::size_t>(y) * w + x] = c;
      ++freq[c];
    }
  }
  auto channel = [](std::uint32_t c, int k) { return static_cast<double>((c >> (8 * k)) & 0xFF); };
  auto dist2 = [&](std::uint32_t a, std::uint32_t b) {
    double d = 0;
    for (int k = 0; k < 3; ++k) d += (channel(a, k) - channel(b, k)) * (channel(a, k) - channel(b, k));
    return d;
  };

  // Greedy mode grouping, most frequent colours first.
  std::vector<std::pair<std::size_t, std::uint32_t>> order;
  for (const auto& [c, n] : freq) order.emplace_back(n, c);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  const double join2 = cfg.meanshift_color_radius * cfg.meanshift_color_radius / 4.0;
  std::vector<std::uint32_t> centre;
  std::unordered_map<std::uint32_t, int> group;
  for (const auto& [n, c] : order) {
    int g = -1;
    for (std::size_t i = 0; i < centre.size(); ++i) {
      if (dist2(c, centre[i]) <= join2) {
        g = static_cast<int>(i);
        break;
      }
    }
    if (g < 0) {
      g = static_cast<int>(centre.size());
      centre.push_back(c);
    }
    group[c] = g;
  }
  std::vector<int> label(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) label[i] = group[ms[i]];

  std::vector<char> solid(centre.size(), 0);
  constexpr int r = 2;
  for (int y = r; y + r < h; ++y) {
    for (int x = r; x + r < w; ++x) {
      const int l = label[static_cast<std::size_t>(y) * w + x];
      if (solid[l]) continue;
      bool same = true;
      for (int dy = -r; dy <= r && same; ++dy)
        for (int dx = -r; dx <= r && same; ++dx) same = label[static_cast<std::size_t>(y + dy) * w + x + dx] == l;
      if (same) solid[l] = 1;
    }
  }
  if (std::find(solid.begin(), solid.end(), 1) != solid.end()) {
    for (std::size_t i = 0; i < ms.size(); ++i) {
      if (solid[label[i]]) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t g = 0; g < centre.size(); ++g) {
        if (!solid[g]) continue;
        const double d = dist2(ms[i], centre[g]);
        if (d < best) {
          best = d;
          label[i] = static_cast<int>(g);
        }
      }
    }
  }

  // Most frequent original colour per mode.
  std::vector<std::map<std::uint32_t, std::size_t>> votes(centre.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgb c = img.at(x, y);
      ++votes[label[static_cast<std::size_t>(y) * w + x]][pack(c[2], c[1], c[0])];
    }
  }
  std::vector<Rgb> paint(centre.size());
  for (std::size_t g = 0; g < centre.size(); ++g) {
    std::uint32_t best = 0;
    std::size_t n = 0;
    for (const auto& [c, k] : votes[g]) {
      if (k > n) {
        n = k;
        best = c;
      }
    }
    paint[g] = {static_cast<std::uint8_t>(best >> 16), static_cast<std::uint8_t>(best >> 8),
                static_cast<std::uint8_t>(best)};
  }
  RawImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.set(x, y, paint[label[static_cast<std::size_t>(y) * w + x]]);
  return out;
}

// --- edges --------------------------------------------------------------------

/// Canny on the colour image (strongest channel gradient), Sobel 3x3, L2
/// magnitude, hysteresis between canny_low and canny_high.
inline BinaryRaster detect_edges(const RawImage& img, const PipelineConfig& cfg) {
  cfg.validate();
  cv::Mat edges;
  cv::Canny(detail::to_bgr(img), edges, cfg.canny_low, cfg.canny_high, 3, true);
  return detail::from_mat(edges);
}

// --- foreground -------------------------------------------------------------

namespace detail {

inline std::optional<PixelRect> raster_bbox(const BinaryRaster& r) {
  int x0 = r.width, y0 = r.height, x1 = -1, y1 = -1;
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      if (r.at(x, y)) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
  if (x1 < 0) return std::nullopt;
  return PixelRect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

inline void check_same_size(const RawImage& img, const BinaryRaster& r, const char* stage) {
  if (img.width() != r.width || img.height() != r.height) {
    throw Error(ErrorCode::InvalidArgument, stage, "raster size does not match image");
  }
}

}  // namespace detail

/// Bright pixels inside the edge region of interest, optionally refined by
/// GrabCut. Specks below the minimum area are dropped.
inline BinaryRaster extract_foreground(const RawImage& img, const BinaryRaster& edges, const PipelineConfig& cfg) {
  cfg.validate();
  detail::check_same_size(img, edges, "foreground");
  const auto roi_box = detail::raster_bbox(edges);
  if (!roi_box) throw Error(ErrorCode::NoModelFound, "foreground", "no edges found: no model in view");
  constexpr int pad = 2;
  const int rx0 = std::max(0, roi_box->x - pad), ry0 = std::max(0, roi_box->y - pad);
  const int rx1 = std::min(img.width(), roi_box->x + roi_box->width + pad);
  const int ry1 = std::min(img.height(), roi_box->y + roi_box->height + pad);

  cv::Mat bright(img.height(), img.width(), CV_8UC1, cv::Scalar(0));
  for (int y = ry0; y < ry1; ++y) {
    for (int x = rx0; x < rx1; ++x) {
      const Rgb c = img.at(x, y);
      if (std::max({c[0], c[1], c[2]}) >= cfg.foreground_threshold) bright.at<std::uint8_t>(y, x) = 255;
    }
  }

  if (cfg.graphcut && cv::countNonZero(bright) > 0) {
    cv::Mat gc(img.height(), img.width(), CV_8UC1, cv::Scalar(cv::GC_BGD));
    for (int y = ry0; y < ry1; ++y)
      for (int x = rx0; x < rx1; ++x)
        gc.at<std::uint8_t>(y, x) = bright.at<std::uint8_t>(y, x) ? cv::GC_PR_FGD : cv::GC_PR_BGD;
    if (cv::countNonZero(gc == cv::GC_PR_BGD) + cv::countNonZero(gc == cv::GC_BGD) > 0) {
      cv::Mat bgd, fgd;
      cv::grabCut(detail::to_bgr(img), gc, cv::Rect(rx0, ry0, rx1 - rx0, ry1 - ry0), bgd, fgd,
                  cfg.graphcut_iterations, cv::GC_INIT_WITH_MASK);
      bright = (gc == cv::GC_FGD) | (gc == cv::GC_PR_FGD);
    }
  }

  cv::Mat labels, stats, centroids;
  const int n = cv::connectedComponentsWithStats(bright, labels, stats, centroids, 8, CV_32S);
  int largest = 0;
  for (int i = 1; i < n; ++i) largest = std::max(largest, stats.at<int>(i, cv::CC_STAT_AREA));
  if (largest == 0) throw Error(ErrorCode::NoModelFound, "foreground", "no bright region: no model in view");
  std::vector<char> keep(static_cast<std::size_t>(n), 0);
  for (int i = 1; i < n; ++i)
    keep[i] = stats.at<int>(i, cv::CC_STAT_AREA) >= cfg.foreground_min_area || stats.at<int>(i, cv::CC_STAT_AREA) == largest;
  BinaryRaster fg(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) fg.set(x, y, keep[labels.at<int>(y, x)]);
  return fg;
}

// --- reference brick ------------------------------------------------------------

struct SegmentationResult {
  BinaryRaster foreground;
  PixelRect reference_box;
  double px_per_cell_x = 0.0;
  double px_per_cell_y = 0.0;
};

namespace detail {

/// Picks the cell pitch along one axis. The foreground spans a whole number
/// of cells, so candidate pitches are span / n for n near span / measured.
/// Each candidate is scored by how often its predicted cell borders land on
/// colour changes in the image; ties go to the pitch closest to the
/// measured reference size.
inline double refine_pitch(const RawImage& img, const BinaryRaster& fg, const PixelRect& box, bool horizontal,
                           double measured) {
  const int along = horizontal ? img.width() : img.height();
  const int lo = horizontal ? box.x : box.y;
  const int span = horizontal ? box.width : box.height;
  const int across0 = horizontal ? box.y : box.x;
  const int across1 = across0 + (horizontal ? box.height : box.width);
  // change[i]: colour differs between pixel i-1 and i along the axis
  std::vector<double> change(static_cast<std::size_t>(along) + 1, 0.0);
  for (int i = 1; i < along; ++i) {
    int n = 0;
    for (int j = across0; j < across1; ++j) {
      const int x0 = horizontal ? i - 1 : j, y0 = horizontal ? j : i - 1;
      const int x1 = horizontal ? i : j, y1 = horizontal ? j : i;
      if (!fg.at(x0, y0) && !fg.at(x1, y1)) continue;
      n += img.at(x0, y0) != img.at(x1, y1);
    }
    change[i] = n;
  }
  const double tolerance = std::max(2.0, 0.15 * measured);
  const int n_lo = std::max(1, static_cast<int>(std::floor(span / (measured + tolerance))));
  const int n_hi = std::max(1, static_cast<int>(std::ceil(span / std::max(1.0, measured - tolerance))));
  double best_pitch = measured, best_score = -1.0, best_gap = 0.0;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double pitch = static_cast<double>(span) / n;
    const double gap = std::abs(pitch - measured);
    if (gap > tolerance) continue;
    double score = 0.0;
    for (int k = 1; k < n; ++k) {
      const int at = static_cast<int>(std::lround(lo + k * pitch));
      double m = 0.0;
      for (int d = -1; d <= 1; ++d)
        if (at + d >= 1 && at + d < along) m = std::max(m, change[at + d]);
      score += m;
    }
    if (n > 1) score /= (n - 1);
    if (score > best_score + 1e-9 || (std::abs(score - best_score) <= 1e-9 && gap < best_gap)) {
      best_score = score;
      best_pitch = pitch;
      best_gap = gap;
    }
  }
  return best_pitch;
}

}  // namespace detail

/// The white brick spans exactly one grid cell; its bounding box gives the
/// cell size in pixels, refined against the foreground's extent.
inline SegmentationResult locate_reference_brick(const RawImage& img, const BinaryRaster& foreground,
                                                 const PipelineConfig& cfg) {
  cfg.validate();
  detail::check_same_size(img, foreground, "reference");
  const auto fg_box = detail::raster_bbox(foreground);
  if (!fg_box) throw Error(ErrorCode::NoModelFound, "reference", "foreground is empty");
  cv::Mat white(img.height(), img.width(), CV_8UC1, cv::Scalar(0));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Rgb c = img.at(x, y);
      if (foreground.at(x, y) && c[0] >= cfg.white_threshold && c[1] >= cfg.white_threshold &&
          c[2] >= cfg.white_threshold) {
        white.at<std::uint8_t>(y, x) = 255;
      }
    }
  }
  cv::Mat labels, stats, centroids;
  const int n = cv::connectedComponentsWithStats(white, labels, stats, centroids, 4, CV_32S);
  int first = 0, second = 0, best = -1;
  for (int i = 1; i < n; ++i) {
    const int a = stats.at<int>(i, cv::CC_STAT_AREA);
    if (a > first) {
      second = first;
      first = a;
      best = i;
    } else if (a > second) {
      second = a;
    }
  }
  if (best < 0) throw Error(ErrorCode::ReferenceNotFound, "reference", "no white reference brick found");
  if (second >= 0.8 * first) {
    throw Error(ErrorCode::AmbiguousReference, "reference",
                "two white regions of similar size (" + std::to_string(first) + " and " + std::to_string(second) +
                    " px)");
  }
  SegmentationResult seg;
  seg.foreground = foreground;
  seg.reference_box = {stats.at<int>(best, cv::CC_STAT_LEFT), stats.at<int>(best, cv::CC_STAT_TOP),
                       stats.at<int>(best, cv::CC_STAT_WIDTH), stats.at<int>(best, cv::CC_STAT_HEIGHT)};
  seg.px_per_cell_x = detail::refine_pitch(img, foreground, *fg_box, true, seg.reference_box.width);
  seg.px_per_cell_y = detail::refine_pitch(img, foreground, *fg_box, false, seg.reference_box.height);
  return seg;
}

// --- rasterization ------------------------------------------------------------

struct GridPlacement {
  double offset_x = 0.0, offset_y = 0.0;  // position of a cell corner, in [0, pitch)
  double pitch_x = 0.0, pitch_y = 0.0;
};

namespace detail {

/// Summed-area table with bilinear lookup: exact foreground area of any
/// axis-aligned real rectangle, pixels treated as unit squares.
class CoverageTable {
 public:
  explicit CoverageTable(const BinaryRaster& r) : w_(r.width), h_(r.height) {
    sat_.assign(static_cast<std::size_t>(w_ + 1) * (h_ + 1), 0.0);
    for (int y = 0; y < h_; ++y)
      for (int x = 0; x < w_; ++x)
        sat_[idx(x + 1, y + 1)] = r.at(x, y) + sat_[idx(x, y + 1)] + sat_[idx(x + 1, y)] - sat_[idx(x, y)];
  }
  double area(double x0, double y0, double x1, double y1) const {
    return lookup(x1, y1) - lookup(x0, y1) - lookup(x1, y0) + lookup(x0, y0);
  }

 private:
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * (w_ + 1) + x; }
  double lookup(double x, double y) const {
    x = std::clamp(x, 0.0, static_cast<double>(w_));
    y = std::clamp(y, 0.0, static_cast<double>(h_));
    const int ix = std::min(static_cast<int>(x), w_ - 1), iy = std::min(static_cast<int>(y), h_ - 1);
    const double fx = x - ix, fy = y - iy;
    return sat_[idx(ix, iy)] * (1 - fx) * (1 - fy) + sat_[idx(ix + 1, iy)] * fx * (1 - fy) +
           sat_[idx(ix, iy + 1)] * (1 - fx) * fy + sat_[idx(ix + 1, iy + 1)] * fx * fy;
  }
  int w_, h_;
  std::vector<double> sat_;
};

struct CellCoverage {
  int first_col = 0, first_row = 0, cols = 0, rows = 0;
  std::vector<double> fraction;  // row-major
};

inline CellCoverage cell_coverage(const CoverageTable& t, const PixelRect& box, const GridPlacement& g) {
  CellCoverage c;
  c.first_col = static_cast<int>(std::floor((box.x - g.offset_x) / g.pitch_x));
  c.first_row = static_cast<int>(std::floor((box.y - g.offset_y) / g.pitch_y));
  const int last_col = static_cast<int>(std::floor((box.x + box.width - g.offset_x) / g.pitch_x));
  const int last_row = static_cast<int>(std::floor((box.y + box.height - g.offset_y) / g.pitch_y));
  c.cols = last_col - c.first_col + 1;
  c.rows = last_row - c.first_row + 1;
  c.fraction.resize(static_cast<std::size_t>(c.cols) * c.rows);
  const double cell_area = g.pitch_x * g.pitch_y;
  for (int r = 0; r < c.rows; ++r) {
    const double y0 = g.offset_y + (c.first_row + r) * g.pitch_y;
    for (int k = 0; k < c.cols; ++k) {
      const double x0 = g.offset_x + (c.first_col + k) * g.pitch_x;
      c.fraction[static_cast<std::size_t>(r) * c.cols + k] = t.area(x0, y0, x0 + g.pitch_x, y0 + g.pitch_y) / cell_area;
    }
  }
  return c;
}

}  // namespace detail

/// Grid offset minimising the total cell ambiguity sum(min(f, 1 - f)),
/// searched in quarter-pixel steps over one cell.
inline GridPlacement place_grid(const BinaryRaster& fg, double pitch_x, double pitch_y) {
  const auto box = detail::raster_bbox(fg);
  GridPlacement best{0.0, 0.0, pitch_x, pitch_y};
  if (!box) return best;
  const detail::CoverageTable table(fg);
  double best_cost = std::numeric_limits<double>::infinity();
  constexpr double step = 0.25;
  for (double oy = 0.0; oy < pitch_y; oy += step) {
    for (double ox = 0.0; ox < pitch_x; ox += step) {
      const GridPlacement g{ox, oy, pitch_x, pitch_y};
      const auto cov = detail::cell_coverage(table, *box, g);
      double cost = 0.0;
      for (double f : cov.fraction) cost += std::min(f, 1.0 - f);
      if (cost < best_cost - 1e-9) {
        best_cost = cost;
        best = g;
      }
    }
  }
  return best;
}

/// Cells whose foreground coverage reaches the occupancy threshold, cropped
/// to the filled bounding box. Row 0 is the top of the image.
inline BrickBitmask rasterize_to_bitmask(const BinaryRaster& foreground, const SegmentationResult& seg,
                                         const PipelineConfig& cfg) {
  cfg.validate();
  if (!(seg.px_per_cell_x > 0.0) || !(seg.px_per_cell_y > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rasterize", "cell size in pixels must be positive");
  }
  const auto box = detail::raster_bbox(foreground);
  if (!box) throw Error(ErrorCode::NoModelFound, "rasterize", "foreground is empty");
  const GridPlacement g = place_grid(foreground, seg.px_per_cell_x, seg.px_per_cell_y);
  const auto cov = detail::cell_coverage(detail::CoverageTable(foreground), *box, g);
  BrickBitmask grid(cov.cols, cov.rows);
  for (int r = 0; r < cov.rows; ++r)
    for (int c = 0; c < cov.cols; ++c)
      grid.set(c, r, cov.fraction[static_cast<std::size_t>(r) * cov.cols + c] >= cfg.occupancy_threshold - 1e-12);
  if (grid.empty()) throw Error(ErrorCode::NoModelFound, "rasterize", "no cell reaches the occupancy threshold");
  return grid.cropped();
}

// --- full scan --------------------------------------------------------------

struct ScanStages {
  RawImage preprocessed;
  RawImage quantized;
  BinaryRaster edges;
  BinaryRaster foreground;
};

struct ScanResult {
  Profile profile;
  SegmentationResult segmentation;
  std::vector<Warning> warnings;
};

inline ScanResult scan_profile(const RawImage& img, Side side, const PipelineConfig& cfg,
                               ScanStages* stages = nullptr) {
  cfg.validate();
  const RawImage pre = preprocess(img, cfg);
  if (stages) stages->preprocessed = pre;
  const RawImage quant = quantize_colors(pre, cfg);
  if (stages) stages->quantized = quant;
  const BinaryRaster edges = detect_edges(quant, cfg);
  if (stages) stages->edges = edges;
  const BinaryRaster fg = extract_foreground(quant, edges, cfg);
  if (stages) stages->foreground = fg;
  SegmentationResult seg = locate_reference_brick(quant, fg, cfg);
  const BrickBitmask mask = rasterize_to_bitmask(fg, seg, cfg);
  ScanResult out{Profile(mask, side, cfg.cell), std::move(seg), {}};
  if (auto w = disconnection_warning(mask)) out.warnings.push_back(*w);
  return out;
}

}  // namespace brickstart
