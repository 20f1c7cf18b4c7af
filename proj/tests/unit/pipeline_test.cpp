#include <doctest.h>

#include <random>

#include "palmroi/pipeline.hpp"
#include "palmroi/synth.hpp"

using namespace palmroi;
using nlohmann::json;

namespace {

ErrorCode config_error(const json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;  // no throw
}

}  // namespace

TEST_CASE("open hand runs end to end") {
  const auto hand = synth::generate_hand(synth::default_hand(), 640, 480);
  const auto r = run_pipeline(hand.image, PipelineConfig{});
  const PipelineReport& rep = r.report;
  REQUIRE(rep.ok);
  CHECK_FALSE(rep.error.has_value());
  CHECK_FALSE(rep.failed_stage.has_value());
  REQUIRE(rep.main_points.has_value());
  REQUIRE(r.roi.has_value());
  REQUIRE(r.lines.has_value());
  CHECK(r.roi->side == 128);
  CHECK(r.lines->side == 128);
  CHECK(count_foreground(r.lines->data) > 0);
  CHECK(rep.finger_pairs == 4);
  CHECK(rep.key_points.size() == 3);
  CHECK(rep.timings.size() == kStageCount);
  for (const auto& t : rep.timings) CHECK(t.ms >= 0.0);
  CHECK(rep.hand_scale == doctest::Approx(hand.truth.hand_scale));
  const double tol = std::max(2.0, 0.01 * hand.truth.hand_scale);
  for (const KeyPoint& k : *rep.main_points) {
    double best = 1e9;
    for (const Vec2& v : hand.truth.valley_points) best = std::min(best, distance(v, k.position));
    CHECK(best <= tol);
  }
  // The frame's x axis points away from the fingers.
  const Vec2 tip_dir = hand.truth.finger_axes[1];
  CHECK(dot(rep.frame->x_axis, tip_dir) < 0.0);
}

TEST_CASE("pipeline is deterministic") {
  synth::HandParams p = synth::default_hand(true);
  p.noise_sigma = 4.0;
  p.rotation_deg = 123.0;
  p.scale = 0.8;
  const GrayImage img = synth::generate_hand(p, 640, 480).image;
  const PipelineConfig cfg;
  const auto a = run_pipeline(img, cfg);
  const auto b = run_pipeline(img, cfg);
  REQUIRE(a.report.ok);
  CHECK(a.roi->data == b.roi->data);
  CHECK(a.lines->data == b.lines->data);
  CHECK(report_to_json(a.report, cfg).dump() == report_to_json(b.report, cfg).dump());
}

TEST_CASE("every constructed failure names its stage") {
  for (const auto& fc : synth::failure_corpus(640, 480)) {
    const auto r = run_pipeline(fc.image, PipelineConfig{});
    INFO(fc.name);
    CHECK_FALSE(r.report.ok);
    CHECK_FALSE(r.roi.has_value());
    REQUIRE(r.report.failed_stage.has_value());
    REQUIRE(r.report.error.has_value());
    CHECK(to_string(*r.report.failed_stage) == fc.stage);
    CHECK(to_string(*r.report.error) == fc.error);
    const json j = report_to_json(r.report, PipelineConfig{});
    CHECK(j["status"] == "error");
    CHECK(j["error"]["stage"] == fc.stage);
    CHECK(j["error"]["code"] == fc.error);
    // Timings cover the stages that finished.
    CHECK(r.report.timings.size() == static_cast<std::size_t>(*r.report.failed_stage));
  }
}

TEST_CASE("the trace is filled up to the failure") {
  const auto cases = synth::failure_corpus(320, 240);
  PipelineTrace trace;
  run_pipeline(cases[5].image, PipelineConfig{}, &trace);  // one finger
  CHECK(trace.mask.width() == 320);
  CHECK(trace.chain.size() > 0);
  CHECK_FALSE(trace.long_segments.empty());
  CHECK(trace.vshapes.empty());
}

TEST_CASE("config round-trips through JSON") {
  PipelineConfig c;
  CHECK(config_from_json(to_json(c)) == c);
  c.polarity = Polarity::ForegroundDark;
  c.strip_halfwidth = 1.75;
  c.scale_strip_with_image = false;
  c.connect = {6.5, 7.0, 2.25};
  c.min_length_fraction = 0.1;
  c.pairing = {9.0, 0.04, 0.3, 0.45, false};
  c.parallel_tol_deg = 2.5;
  c.roi = {1.1, 0.6, 96};
  c.threshold = {ThresholdMode::Absolute, 250.0};
  const PipelineConfig back = config_from_json(json::parse(to_json(c).dump()));
  CHECK(back == c);
  CHECK(to_json(back).dump() == to_json(c).dump());
}

TEST_CASE("random valid configs round-trip") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    PipelineConfig c;
    c.strip_halfwidth = 0.1 + 10 * u(rng);
    c.connect = {20 * u(rng), 90 * u(rng), 10 * u(rng)};
    c.min_length_fraction = 0.9 * u(rng);
    c.pairing.angle_tol_deg = 0.5 + 40 * u(rng);
    c.pairing.width_min = 0.01 + 0.3 * u(rng);
    c.pairing.width_max = c.pairing.width_min + 0.01 + 0.5 * u(rng);
    c.pairing.overlap_min = u(rng);
    c.roi = {0.1 + 3.5 * u(rng), 3.9 * u(rng), 16 + static_cast<int>(rng() % 500)};
    c.threshold = {ThresholdMode::Percentile, 1 + 98 * u(rng)};
    CHECK(config_from_json(json::parse(to_json(c).dump())) == c);
  }
}

TEST_CASE("partial config overlays the base") {
  const PipelineConfig c = config_from_json(json{{"roi", {{"beta", 1.5}}}});
  CHECK(c.roi.beta == 1.5);
  CHECK(c.roi.delta == PipelineConfig{}.roi.delta);
  CHECK(c.strip_halfwidth == PipelineConfig{}.strip_halfwidth);
}

TEST_CASE("bad configs are rejected") {
  CHECK(config_error(json{{"unknown", 1}}) == ErrorCode::InvalidConfig);
  CHECK(config_error(json{{"roi", {{"size", 3}}}}) == ErrorCode::InvalidConfig);
  CHECK(config_error(json{{"roi", {{"beta", "big"}}}}) == ErrorCode::InvalidConfig);
  CHECK(config_error(json{{"roi", {{"beta", -1.0}}}}) == ErrorCode::InvalidConfig);
  CHECK(config_error(json{{"roi", {{"out_side", 8}}}}) == ErrorCode::InvalidConfig);
  CHECK(config_error(json{{"polarity", "sideways"}}) == ErrorCode::InvalidConfig);
  CHECK(config_error(json{{"threshold", {{"mode", "percentile"}, {"value", 100.0}}}}) ==
        ErrorCode::InvalidConfig);
  CHECK(config_error(json{{"pairing", {{"width_min", 0.3}, {"width_max", 0.2}}}}) ==
        ErrorCode::InvalidConfig);
  CHECK(config_error(json::array()) == ErrorCode::InvalidConfig);
  PipelineConfig bad;
  bad.strip_halfwidth = 0.0;
  CHECK_THROWS_AS(run_pipeline(GrayImage(10, 10, 1), bad), Error);
}

TEST_CASE("report JSON layout") {
  const PipelineConfig cfg;
  const auto r = run_pipeline(synth::generate_hand(synth::default_hand(), 640, 480).image, cfg);
  const json j = report_to_json(r.report, cfg);
  CHECK(j["status"] == "ok");
  CHECK(j["main_key_points"].size() == 3);
  CHECK(j.contains("frame"));
  CHECK(j.contains("roi"));
  CHECK(j["config"] == to_json(cfg));
  CHECK_FALSE(j.contains("timings_ms"));
  const json t = report_to_json(r.report, cfg, true);
  REQUIRE(t.contains("timings_ms"));
  CHECK(t["timings_ms"].size() == kStageCount);
}

TEST_CASE("stage names") {
  CHECK(to_string(Stage::Binarize) == "binarize");
  CHECK(to_string(Stage::SelectMainKeypoints) == "select_main_keypoints");
  CHECK(to_string(Stage::Thin) == "thin");
}

TEST_CASE("strip half-width scales with the image diagonal") {
  const auto small = run_pipeline(synth::generate_hand(synth::default_hand(), 320, 240).image,
                                  PipelineConfig{});
  CHECK(small.report.strip_halfwidth == doctest::Approx(1.0));
  PipelineConfig fixed;
  fixed.scale_strip_with_image = false;
  const auto r = run_pipeline(synth::generate_hand(synth::default_hand(), 320, 240).image, fixed);
  CHECK(r.report.strip_halfwidth == 2.0);
}
