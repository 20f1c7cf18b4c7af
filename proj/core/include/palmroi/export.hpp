#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "palmroi/contour.hpp"
#include "palmroi/grouping.hpp"
#include "palmroi/image.hpp"
#include "palmroi/polyline.hpp"
#include "palmroi/roi.hpp"

namespace palmroi {

nlohmann::json to_json(const ContourChain& chain);
nlohmann::json to_json(const LineSegment& seg);
nlohmann::json to_json(const std::vector<LineSegment>& segs);
nlohmann::json grouping_json(const std::vector<ParallelPair>& pairs,
                             const std::vector<VShapePair>& vshapes,
                             const std::vector<Line>& center_lines,
                             const std::vector<KeyPoint>& key_points);

using Rgb = std::array<std::uint8_t, 3>;

/// RGB drawing surface for debug overlays.
class Canvas {
 public:
  explicit Canvas(const GrayImage& background);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const std::vector<std::uint8_t>& rgb() const noexcept { return rgb_; }

  void set(int x, int y, Rgb c);
  void line(Vec2 a, Vec2 b, Rgb c);
  void dot(Vec2 p, int radius, Rgb c);
  /// Blends `c` over foreground pixels of `mask` at the given opacity.
  void tint(const BinaryImage& mask, Rgb c, double alpha);

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> rgb_;
};

/// Distinct colour for item i.
Rgb palette(std::size_t i);

Canvas overlay_contour(const GrayImage& img, const BinaryImage& mask, const ContourChain& chain);
Canvas overlay_segments(const GrayImage& img, const std::vector<LineSegment>& segs);
/// Both edges of a finger share one colour.
Canvas overlay_pairs(const GrayImage& img, const std::vector<ParallelPair>& pairs);
/// Both lines of a V-shape share one colour; center lines in white, key
/// points as dots.
Canvas overlay_vshapes(const GrayImage& img, const std::vector<VShapePair>& vshapes,
                       const std::vector<Line>& center_lines,
                       const std::vector<KeyPoint>& key_points);
/// Main key points, palm frame axes and the ROI square.
Canvas overlay_roi(const GrayImage& img, const std::array<KeyPoint, 3>& main,
                   const PalmFrame& frame, const RoiParams& params);

}  // namespace palmroi
