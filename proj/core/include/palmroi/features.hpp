#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "palmroi/image.hpp"
#include "palmroi/roi.hpp"

namespace palmroi {

enum class LineOrientation : std::uint8_t { Horizontal = 0, Vertical = 1, Diagonal45 = 2, Diagonal135 = 3 };

/// 3x3 line-detection masks, indexed by LineOrientation. Diagonal45 has its
/// 2s running bottom-left to top-right on screen.
inline constexpr std::array<std::array<int, 9>, 4> kLineMasks{{
    {-1, -1, -1, 2, 2, 2, -1, -1, -1},
    {-1, 2, -1, -1, 2, -1, -1, 2, -1},
    {-1, -1, 2, -1, 2, -1, 2, -1, -1},
    {2, -1, -1, -1, 2, -1, -1, -1, 2},
}};

/// Per-pixel signed response of the orientation with the largest |response|
/// (first orientation in enum order on ties).
struct LineResponse {
  int width = 0;
  int height = 0;
  std::vector<int> response;
  std::vector<LineOrientation> orientation;

  int at(int x, int y) const { return response[static_cast<std::size_t>(y) * width + x]; }
};

struct LineFeatureMap {
  int side = 0;
  BinaryImage data;
  double threshold_used = 0.0;
};

/// 3x3 box mean, edge-replicated borders, rounded toward zero.
GrayImage smooth(const GrayImage& img);
GrayImage smooth(const RoiImage& roi);

GrayImage invert(const GrayImage& img);

LineResponse line_response(const GrayImage& img);

enum class ThresholdMode {
  Absolute,            // response >= value
  Percentile,          // response >= value-th percentile of all responses
  PositivePercentile,  // percentile taken over responses > 0 only
};

struct ThresholdSpec {
  ThresholdMode mode = ThresholdMode::PositivePercentile;
  double value = 95.0;
};

/// Level for a percentile: the element at index floor(p/100 * n) of the
/// sorted samples (clamped to the last one), so that with distinct samples
/// exactly n - floor(p*n/100) of them reach it.
double percentile_level(std::vector<int> samples, double percentile);

/// Resolves the spec to an absolute level for this response raster.
double resolve_threshold(const LineResponse& resp, const ThresholdSpec& spec);

BinaryImage threshold_map(const LineResponse& resp, const ThresholdSpec& spec);

/// Zhang-Suen thinning to a fixpoint. A component that would vanish in one
/// sub-iteration (the 2x2 block case) keeps its scan-order-first pixel so
/// the component count is preserved.
BinaryImage thin(const BinaryImage& map);

/// smooth -> invert (creases are dark) -> line_response -> threshold -> thin.
LineFeatureMap extract_line_features(const RoiImage& roi, const ThresholdSpec& spec);

}  // namespace palmroi
