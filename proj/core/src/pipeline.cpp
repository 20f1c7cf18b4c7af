#include "palmroi/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <utility>

namespace palmroi {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kStageCount> kStageNames{
    "binarize",       "trace_boundary",        "fit_polyline", "connect_broken",
    "filter_short",   "pair_parallel",         "form_vshapes", "center_line",
    "locate_key_point", "select_main_keypoints", "build_frame",  "extract_roi",
    "smooth",         "line_response",         "threshold_map", "thin",
};

std::string_view polarity_name(Polarity p) {
  switch (p) {
    case Polarity::ForegroundBright: return "bright";
    case Polarity::ForegroundDark: return "dark";
    case Polarity::Auto: break;
  }
  return "auto";
}

std::string_view threshold_mode_name(ThresholdMode m) {
  switch (m) {
    case ThresholdMode::Absolute: return "absolute";
    case ThresholdMode::Percentile: return "percentile";
    case ThresholdMode::PositivePercentile: break;
  }
  return "positive_percentile";
}

[[noreturn]] void bad_config(const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, what);
}

void require(bool ok, const char* field, const char* range) {
  if (!ok) bad_config(std::string(field) + " must be " + range);
}

/// Reads known keys of one JSON object into the matching fields.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad_config(path_.empty() ? "config must be a JSON object" :
                                                    path_ + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.push_back(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) bad_config(name(key) + " must be a boolean");
      out = it->template get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) bad_config(name(key) + " must be an integer");
      out = it->template get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) bad_config(name(key) + " must be a number");
      out = it->template get<T>();
    } else {
      if (!it->is_string()) bad_config(name(key) + " must be a string");
      out = it->template get<T>();
    }
  }

  const json* child(const char* key) {
    seen_.push_back(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      bool known = false;
      for (const auto& s : seen_) known = known || s == key;
      if (!known) bad_config("unknown config key " + name(key.c_str()));
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

json frame_json(const PalmFrame& f) {
  return {{"origin", vec_json(f.origin)},
          {"x_axis", vec_json(f.x_axis)},
          {"y_axis", vec_json(f.y_axis)},
          {"scale", f.scale}};
}

json keypoint_json(const KeyPoint& k) {
  return {{"position", vec_json(k.position)}, {"valley_index", k.valley_index}};
}

}  // namespace

bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
  return to_json(a) == to_json(b);
}

std::string_view to_string(Stage stage) noexcept {
  return kStageNames[static_cast<std::size_t>(stage)];
}

void validate(const PipelineConfig& c) {
  auto finite = [](double v) { return std::isfinite(v); };
  require(finite(c.strip_halfwidth) && c.strip_halfwidth > 0.0 && c.strip_halfwidth <= 50.0,
          "strip_halfwidth", "in (0, 50]");
  require(finite(c.connect.gap_max) && c.connect.gap_max >= 0.0, "connect.gap_max", ">= 0");
  require(c.connect.angle_max_deg >= 0.0 && c.connect.angle_max_deg <= 90.0,
          "connect.angle_max_deg", "in [0, 90]");
  require(finite(c.connect.offset_max) && c.connect.offset_max >= 0.0, "connect.offset_max",
          ">= 0");
  require(c.min_length_fraction >= 0.0 && c.min_length_fraction < 1.0, "min_length_fraction",
          "in [0, 1)");
  require(c.pairing.angle_tol_deg > 0.0 && c.pairing.angle_tol_deg <= 45.0,
          "pairing.angle_tol_deg", "in (0, 45]");
  require(c.pairing.width_min > 0.0 && c.pairing.width_min < c.pairing.width_max &&
              c.pairing.width_max <= 1.0,
          "pairing.width_min/width_max", "0 < min < max <= 1");
  require(c.pairing.overlap_min >= 0.0 && c.pairing.overlap_min <= 1.0, "pairing.overlap_min",
          "in [0, 1]");
  require(c.parallel_tol_deg >= 0.0 && c.parallel_tol_deg <= 45.0, "parallel_tol_deg",
          "in [0, 45]");
  require(c.roi.beta > 0.0 && c.roi.beta <= 4.0, "roi.beta", "in (0, 4]");
  require(c.roi.delta >= 0.0 && c.roi.delta <= 4.0, "roi.delta", "in [0, 4]");
  require(c.roi.out_side >= 16 && c.roi.out_side <= 4096, "roi.out_side", "in [16, 4096]");
  if (c.threshold.mode == ThresholdMode::Absolute) {
    require(finite(c.threshold.value), "threshold.value", "finite");
  } else {
    require(c.threshold.value > 0.0 && c.threshold.value < 100.0, "threshold.value",
            "in (0, 100) for percentile modes");
  }
}

json to_json(const PipelineConfig& c) {
  return {
      {"polarity", polarity_name(c.polarity)},
      {"strip_halfwidth", c.strip_halfwidth},
      {"scale_strip_with_image", c.scale_strip_with_image},
      {"connect",
       {{"gap_max", c.connect.gap_max},
        {"angle_max_deg", c.connect.angle_max_deg},
        {"offset_max", c.connect.offset_max}}},
      {"min_length_fraction", c.min_length_fraction},
      {"pairing",
       {{"angle_tol_deg", c.pairing.angle_tol_deg},
        {"width_min", c.pairing.width_min},
        {"width_max", c.pairing.width_max},
        {"overlap_min", c.pairing.overlap_min},
        {"require_facing", c.pairing.require_facing}}},
      {"parallel_tol_deg", c.parallel_tol_deg},
      {"roi", {{"beta", c.roi.beta}, {"delta", c.roi.delta}, {"out_side", c.roi.out_side}}},
      {"threshold",
       {{"mode", threshold_mode_name(c.threshold.mode)}, {"value", c.threshold.value}}},
  };
}

PipelineConfig config_from_json(const json& j, const PipelineConfig& base) {
  PipelineConfig c = base;
  ObjectReader top(j, "");
  std::string polarity(polarity_name(c.polarity));
  top.read("polarity", polarity);
  if (polarity == "auto") {
    c.polarity = Polarity::Auto;
  } else if (polarity == "bright") {
    c.polarity = Polarity::ForegroundBright;
  } else if (polarity == "dark") {
    c.polarity = Polarity::ForegroundDark;
  } else {
    bad_config("polarity must be auto, bright or dark");
  }
  top.read("strip_halfwidth", c.strip_halfwidth);
  top.read("scale_strip_with_image", c.scale_strip_with_image);
  if (const json* s = top.child("connect")) {
    ObjectReader r(*s, "connect");
    r.read("gap_max", c.connect.gap_max);
    r.read("angle_max_deg", c.connect.angle_max_deg);
    r.read("offset_max", c.connect.offset_max);
    r.reject_unknown();
  }
  top.read("min_length_fraction", c.min_length_fraction);
  if (const json* s = top.child("pairing")) {
    ObjectReader r(*s, "pairing");
    r.read("angle_tol_deg", c.pairing.angle_tol_deg);
    r.read("width_min", c.pairing.width_min);
    r.read("width_max", c.pairing.width_max);
    r.read("overlap_min", c.pairing.overlap_min);
    r.read("require_facing", c.pairing.require_facing);
    r.reject_unknown();
  }
  top.read("parallel_tol_deg", c.parallel_tol_deg);
  if (const json* s = top.child("roi")) {
    ObjectReader r(*s, "roi");
    r.read("beta", c.roi.beta);
    r.read("delta", c.roi.delta);
    r.read("out_side", c.roi.out_side);
    r.reject_unknown();
  }
  if (const json* s = top.child("threshold")) {
    ObjectReader r(*s, "threshold");
    std::string mode(threshold_mode_name(c.threshold.mode));
    r.read("mode", mode);
    if (mode == "absolute") {
      c.threshold.mode = ThresholdMode::Absolute;
    } else if (mode == "percentile") {
      c.threshold.mode = ThresholdMode::Percentile;
    } else if (mode == "positive_percentile") {
      c.threshold.mode = ThresholdMode::PositivePercentile;
    } else {
      bad_config("threshold.mode must be absolute, percentile or positive_percentile");
    }
    r.read("value", c.threshold.value);
    r.reject_unknown();
  }
  top.reject_unknown();
  validate(c);
  return c;
}

PipelineResult run_pipeline(const GrayImage& img, const PipelineConfig& cfg,
                            PipelineTrace* trace) {
  validate(cfg);
  PipelineResult result;
  PipelineReport& rep = result.report;
  PipelineTrace local;
  PipelineTrace& t = trace ? *trace : local;

  Stage current = Stage::Binarize;
  auto run = [&](Stage s, auto&& body) {
    current = s;
    const auto start = std::chrono::steady_clock::now();
    body();
    const std::chrono::duration<double, std::milli> elapsed =
        std::chrono::steady_clock::now() - start;
    rep.timings.push_back({s, elapsed.count()});
  };

  try {
    run(Stage::Binarize, [&] { t.mask = binarize(img, cfg.polarity); });
    const BoundingBox box = foreground_bbox(t.mask);
    rep.hand_scale = box.longer_side();
    rep.centroid = foreground_centroid(t.mask);

    run(Stage::TraceBoundary, [&] { t.chain = trace_boundary(t.mask); });

    rep.strip_halfwidth = cfg.strip_halfwidth;
    if (cfg.scale_strip_with_image) {
      rep.strip_halfwidth *= std::hypot(img.width(), img.height()) / 800.0;
    }
    run(Stage::FitPolyline, [&] { t.raw_segments = fit_polyline(t.chain, rep.strip_halfwidth); });
    run(Stage::ConnectBroken,
        [&] { t.connected = connect_broken(t.raw_segments, cfg.connect, t.chain.size()); });
    run(Stage::FilterShort, [&] {
      t.long_segments = filter_short(t.connected, cfg.min_length_fraction * rep.hand_scale);
    });
    rep.segment_count = t.long_segments.size();

    run(Stage::PairParallel,
        [&] { t.pairs = pair_parallel(t.long_segments, rep.hand_scale, cfg.pairing); });
    rep.finger_pairs = t.pairs.size();
    run(Stage::FormVShapes, [&] { t.vshapes = form_vshapes(t.pairs, cfg.parallel_tol_deg); });
    run(Stage::CenterLine, [&] {
      for (const auto& v : t.vshapes) t.center_lines.push_back(center_line(v));
    });
    run(Stage::LocateKeyPoint, [&] {
      for (std::size_t i = 0; i < t.vshapes.size(); ++i) {
        rep.key_points.push_back(locate_key_point(t.center_lines[i], t.chain, t.vshapes[i]));
      }
    });

    MainKeyPoints main;
    run(Stage::SelectMainKeypoints, [&] {
      if (rep.key_points.size() < 3) {
        throw Error(ErrorCode::TooFewValleys,
                    "found " + std::to_string(rep.key_points.size()) + " valleys, need 3");
      }
      main = select_main_keypoints(rep.key_points);
      // Palm side: the valley center lines all run from the gaps toward the
      // palm. Unlike the mask centroid this holds when the palm is cropped.
      Vec2 inward;
      for (const auto& l : t.center_lines) inward += l.direction;
      const Vec2 mid = (main.points[0].position + main.points[2].position) * 0.5;
      rep.palm_reference = mid + normalized(inward) * (0.25 * rep.hand_scale);
      // Fix the handedness so the frame does not depend on which end the
      // left-to-right sort happened to start from.
      const Vec2 span = main.points[2].position - main.points[0].position;
      if (cross(rep.palm_reference - mid, span) > 0.0) std::swap(main.points[0], main.points[2]);
    });
    rep.main_points = main.points;
    rep.selected_first = main.first;

    PalmFrame frame;
    run(Stage::BuildFrame,
        [&] { frame = build_frame(main.points[0], main.points[1], main.points[2], rep.palm_reference); });
    rep.frame = frame;

    RoiImage roi;
    run(Stage::ExtractRoi, [&] { roi = extract_roi(img, frame, cfg.roi); });
    rep.roi = roi.provenance;

    GrayImage smoothed;
    run(Stage::Smooth, [&] { smoothed = invert(smooth(roi)); });
    run(Stage::LineResponse, [&] { t.response = line_response(smoothed); });
    LineFeatureMap lines;
    lines.side = roi.side;
    run(Stage::ThresholdMap, [&] {
      lines.threshold_used = resolve_threshold(t.response, cfg.threshold);
      t.thresholded =
          threshold_map(t.response, ThresholdSpec{ThresholdMode::Absolute, lines.threshold_used});
    });
    run(Stage::Thin, [&] { lines.data = thin(t.thresholded); });
    rep.threshold_used = lines.threshold_used;

    result.roi = std::move(roi);
    result.lines = std::move(lines);
    rep.ok = true;
  } catch (const Error& e) {
    rep.ok = false;
    rep.error = e.code();
    rep.failed_stage = current;
    rep.message = e.what();
  }
  return result;
}

json report_to_json(const PipelineReport& r, const PipelineConfig& cfg, bool include_timings) {
  json j;
  j["status"] = r.ok ? "ok" : "error";
  if (!r.ok) {
    j["error"] = {{"code", r.error ? std::string(to_string(*r.error)) : "unknown"},
                  {"stage", r.failed_stage ? std::string(to_string(*r.failed_stage)) : ""},
                  {"message", r.message}};
  }
  j["hand_scale"] = r.hand_scale;
  j["centroid"] = vec_json(r.centroid);
  if (r.main_points) j["palm_reference"] = vec_json(r.palm_reference);
  j["strip_halfwidth"] = r.strip_halfwidth;
  j["segment_count"] = r.segment_count;
  j["finger_pairs"] = r.finger_pairs;
  j["key_points"] = json::array();
  for (const auto& k : r.key_points) j["key_points"].push_back(keypoint_json(k));
  if (r.main_points) {
    json m = json::array();
    for (const auto& k : *r.main_points) m.push_back(keypoint_json(k));
    j["main_key_points"] = std::move(m);
    j["selected_first"] = r.selected_first;
  }
  if (r.frame) j["frame"] = frame_json(*r.frame);
  if (r.roi) {
    j["roi"] = {{"beta", r.roi->beta},
                {"delta", r.roi->delta},
                {"out_of_bounds", r.roi->out_of_bounds},
                {"out_of_bounds_fraction", r.roi->out_of_bounds_fraction}};
    j["line_threshold"] = r.threshold_used;
  }
  if (include_timings) {
    json tm = json::object();
    for (const auto& s : r.timings) tm[std::string(to_string(s.stage))] = s.ms;
    j["timings_ms"] = std::move(tm);
  }
  j["config"] = to_json(cfg);
  return j;
}

}  // namespace palmroi
