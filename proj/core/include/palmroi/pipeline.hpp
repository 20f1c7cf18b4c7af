#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "palmroi/contour.hpp"
#include "palmroi/error.hpp"
#include "palmroi/features.hpp"
#include "palmroi/grouping.hpp"
#include "palmroi/image.hpp"
#include "palmroi/polyline.hpp"
#include "palmroi/roi.hpp"

namespace palmroi {

struct PipelineConfig {
  Polarity polarity = Polarity::Auto;
  /// Strip half-width in px for a 640x480 image; scaled by diagonal / 800
  /// when `scale_strip_with_image` is set.
  double strip_halfwidth = 2.0;
  bool scale_strip_with_image = true;
  ConnectParams connect;
  /// Segments shorter than this fraction of the hand scale are dropped.
  double min_length_fraction = 0.15;
  PairingParams pairing{8.0, 0.05, 0.22, 0.3, true};
  double parallel_tol_deg = 3.0;
  RoiParams roi;
  ThresholdSpec threshold;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&);
};

/// Throws Error(InvalidConfig) naming the first out-of-range field.
void validate(const PipelineConfig& cfg);

nlohmann::json to_json(const PipelineConfig& cfg);
/// Overlays the keys present in `j` onto `base`. Unknown keys and wrongly
/// typed values throw Error(InvalidConfig); the result is validated.
PipelineConfig config_from_json(const nlohmann::json& j, const PipelineConfig& base = {});

enum class Stage {
  Binarize,
  TraceBoundary,
  FitPolyline,
  ConnectBroken,
  FilterShort,
  PairParallel,
  FormVShapes,
  CenterLine,
  LocateKeyPoint,
  SelectMainKeypoints,
  BuildFrame,
  ExtractRoi,
  Smooth,
  LineResponse,
  ThresholdMap,
  Thin,
};
inline constexpr std::size_t kStageCount = 16;

std::string_view to_string(Stage stage) noexcept;

struct StageTiming {
  Stage stage;
  double ms = 0.0;
};

struct PipelineReport {
  bool ok = false;
  std::optional<ErrorCode> error;
  std::optional<Stage> failed_stage;
  std::string message;

  double hand_scale = 0.0;
  Vec2 centroid;
  /// Point on the palm side of the K1-K3 line, from the valley center
  /// lines; orients the palm frame.
  Vec2 palm_reference;
  double strip_halfwidth = 0.0;
  std::size_t segment_count = 0;
  std::size_t finger_pairs = 0;
  /// Every located valley point, in valley order.
  std::vector<KeyPoint> key_points;
  /// K1, K2, K3 after ordering so that K1 -> K3 runs clockwise around the
  /// palm reference point.
  std::optional<std::array<KeyPoint, 3>> main_points;
  std::size_t selected_first = 0;
  std::optional<PalmFrame> frame;
  std::optional<RoiProvenance> roi;
  double threshold_used = 0.0;
  std::vector<StageTiming> timings;
};

/// Intermediate products, filled as far as the run got.
struct PipelineTrace {
  BinaryImage mask;
  ContourChain chain;
  std::vector<LineSegment> raw_segments;
  std::vector<LineSegment> connected;
  std::vector<LineSegment> long_segments;
  std::vector<ParallelPair> pairs;
  std::vector<VShapePair> vshapes;
  std::vector<Line> center_lines;
  LineResponse response;
  BinaryImage thresholded;
};

struct PipelineResult {
  std::optional<RoiImage> roi;
  std::optional<LineFeatureMap> lines;
  PipelineReport report;
};

/// Full extraction. Never throws for image content: stage errors end up in
/// the report. An invalid config throws Error(InvalidConfig).
PipelineResult run_pipeline(const GrayImage& img, const PipelineConfig& cfg,
                            PipelineTrace* trace = nullptr);

/// Report as JSON with the effective config echoed. Timings are left out
/// unless asked for, so the default output is byte-stable across runs.
nlohmann::json report_to_json(const PipelineReport& report, const PipelineConfig& cfg,
                              bool include_timings = false);

}  // namespace palmroi
