#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "palmroi/grouping.hpp"
#include "palmroi/pipeline.hpp"
#include "palmroi/synth.hpp"

using namespace palmroi;

namespace {

LineSegment seg(Vec2 a, Vec2 b) { return {a, b, SourceSpan{}}; }

VShapePair vshape(LineSegment a, LineSegment b, VShapeKind kind) {
  VShapePair v;
  v.line_a = a;
  v.line_b = b;
  v.kind = kind;
  return v;
}

std::vector<KeyPoint> kps(std::initializer_list<Vec2> pts) {
  std::vector<KeyPoint> out;
  for (const Vec2& p : pts) out.push_back({p, out.size()});
  return out;
}

double nearest(const std::vector<Vec2>& set, Vec2 p) {
  double best = 1e300;
  for (const Vec2& q : set) best = std::min(best, distance(p, q));
  return best;
}

}  // namespace

TEST_CASE("two long vertical edges 40 px apart pair up") {
  const PairingParams params{10.0, 0.1, 0.3, 0.5, false};
  const auto pairs = pair_parallel({seg({0, 0}, {0, 200}), seg({40, 0}, {40, 200})}, 200.0, params);
  REQUIRE(pairs.size() == 1);
  const Vec2 across = perp(pairs[0].axis);
  CHECK(dot(pairs[0].left_edge.midpoint(), across) < dot(pairs[0].right_edge.midpoint(), across));
  CHECK(pairs[0].order_key == doctest::Approx(dot(pairs[0].midpoint(), across)));
  CHECK(line_angle(pairs[0].axis, {0, 1}) == doctest::Approx(0.0));
}

TEST_CASE("perpendicular segments never pair") {
  const PairingParams params{10.0, 0.0, 10.0, 0.0, false};
  CHECK(pair_parallel({seg({0, 0}, {0, 200}), seg({10, 100}, {210, 100})}, 200.0, params).empty());
}

TEST_CASE("pair_parallel rejects pairs outside the width band or without overlap") {
  const PairingParams params{10.0, 0.1, 0.3, 0.5, false};
  CHECK(pair_parallel({seg({0, 0}, {0, 200}), seg({10, 0}, {10, 200})}, 200.0, params).empty());
  CHECK(pair_parallel({seg({0, 0}, {0, 200}), seg({40, 300}, {40, 500})}, 200.0, params).empty());
}

TEST_CASE("facing requirement uses the clockwise interior side") {
  // A finger traced clockwise on screen: up its left edge, down its right.
  const LineSegment left = seg({0, 200}, {0, 0});
  const LineSegment right = seg({40, 0}, {40, 200});
  PairingParams params{10.0, 0.1, 0.3, 0.5, true};
  CHECK(is_finger_pair(left, right, 200.0, params));
  // The two facing edges of a gap point the other way round.
  CHECK_FALSE(is_finger_pair(seg({0, 0}, {0, 200}), seg({40, 200}, {40, 0}), 200.0, params));
}

TEST_CASE("greedy matching keeps the narrower pair") {
  const PairingParams params{10.0, 0.05, 0.5, 0.5, false};
  const auto pairs = pair_parallel(
      {seg({0, 0}, {0, 200}), seg({30, 0}, {30, 200}), seg({70, 0}, {70, 200})}, 200.0, params);
  REQUIRE(pairs.size() == 1);
  CHECK(std::min(pairs[0].left_edge.p0.x, pairs[0].right_edge.p0.x) == 0.0);
  CHECK(std::max(pairs[0].left_edge.p0.x, pairs[0].right_edge.p0.x) == 30.0);
}

TEST_CASE("pair_parallel does not depend on input order") {
  PipelineTrace trace;
  run_pipeline(synth::generate_hand(synth::default_hand(true), 640, 480).image, PipelineConfig{},
               &trace);
  const PipelineConfig cfg;
  const double scale = 400.0;
  const auto ref = pair_parallel(trace.long_segments, scale, cfg.pairing);
  REQUIRE(ref.size() >= 4);
  std::mt19937 rng(2);
  for (int k = 0; k < 10; ++k) {
    auto shuffled = trace.long_segments;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto got = pair_parallel(shuffled, scale, cfg.pairing);
    REQUIRE(got.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(got[i].left_edge == ref[i].left_edge);
      CHECK(got[i].right_edge == ref[i].right_edge);
    }
  }
}

TEST_CASE("four-finger hand gives four pairs along the true finger axes") {
  const auto hand = synth::generate_hand(synth::default_hand(), 640, 480);
  PipelineTrace trace;
  const auto result = run_pipeline(hand.image, PipelineConfig{}, &trace);
  REQUIRE(result.report.ok);
  REQUIRE(trace.pairs.size() == 4);
  for (const auto& p : trace.pairs) {
    double best = 180.0;
    for (const Vec2& axis : hand.truth.finger_axes) {
      best = std::min(best, rad_to_deg(line_angle(p.axis, axis)));
    }
    CHECK(best <= 3.0);
    CHECK(rad_to_deg(line_angle(p.left_edge.direction(), p.right_edge.direction())) <=
          PipelineConfig{}.pairing.angle_tol_deg);
  }
  for (std::size_t i = 0; i + 1 < trace.pairs.size(); ++i) {
    CHECK(trace.pairs[i].order_key <= trace.pairs[i + 1].order_key);
  }
}

TEST_CASE("form_vshapes cardinality and edge selection") {
  std::vector<ParallelPair> pairs;
  for (int i = 0; i < 4; ++i) {
    ParallelPair p;
    p.left_edge = seg({i * 50.0, 200}, {i * 50.0, 0});
    p.right_edge = seg({i * 50.0 + 30, 0}, {i * 50.0 + 30, 200});
    p.axis = {0, -1};
    p.order_key = i * 50.0 + 15;
    pairs.push_back(p);
  }
  std::reverse(pairs.begin(), pairs.end());  // sorting is form_vshapes' job
  const auto v4 = form_vshapes(pairs);
  REQUIRE(v4.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(v4[j].index == j);
    CHECK(v4[j].line_a.p0.x == doctest::Approx(j * 50.0 + 30));
    CHECK(v4[j].line_b.p0.x == doctest::Approx((j + 1) * 50.0));
    CHECK(v4[j].kind == VShapeKind::Parallel);
  }
  CHECK(form_vshapes({pairs[0], pairs[1]}).size() == 1);
  CHECK_THROWS_AS(form_vshapes({pairs[0]}), Error);
  CHECK_THROWS_AS(form_vshapes({}), Error);
}

TEST_CASE("vshape kind follows the parallel tolerance") {
  ParallelPair a;
  a.left_edge = seg({0, 200}, {0, 0});
  a.right_edge = seg({30, 0}, {30, 200});
  a.order_key = 0;
  ParallelPair b = a;
  const Vec2 tilt{std::sin(deg_to_rad(5.0)), std::cos(deg_to_rad(5.0))};
  b.left_edge = seg(Vec2{40, 0} + tilt * 200.0, {40, 0});
  b.right_edge = seg({70, 0}, Vec2{70, 0} + tilt * 200.0);
  b.order_key = 1;
  CHECK(form_vshapes({a, b}, 3.0)[0].kind == VShapeKind::Intersecting);
  CHECK(form_vshapes({a, b}, 6.0)[0].kind == VShapeKind::Parallel);
}

TEST_CASE("thumb hand: four valleys in ground-truth order") {
  const auto hand = synth::generate_hand(synth::default_hand(true), 640, 480);
  PipelineTrace trace;
  const auto r = run_pipeline(hand.image, PipelineConfig{}, &trace);
  REQUIRE(trace.pairs.size() == 5);
  REQUIRE(trace.vshapes.size() == 4);
  REQUIRE(r.report.key_points.size() == 4);
  const auto& gt = hand.truth.valley_points;
  REQUIRE(gt.size() == 4);
  // The sort direction is intrinsic to the hand, so it may run either way.
  const bool forward = distance(r.report.key_points[0].position, gt[0]) <
                       distance(r.report.key_points[0].position, gt[3]);
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 expected = gt[forward ? i : 3 - i];
    CHECK(distance(r.report.key_points[i].position, expected) < 0.05 * hand.truth.hand_scale);
  }
}

TEST_CASE("center line of a symmetric V is its axis") {
  const double s = std::sin(deg_to_rad(15.0));
  const double c = std::cos(deg_to_rad(15.0));
  const auto v = vshape(seg({-100 * s, -100 * c}, {-10 * s, -10 * c}),
                        seg({10 * s, -10 * c}, {100 * s, -100 * c}), VShapeKind::Intersecting);
  const Line l = center_line(v);
  CHECK(l.point.x == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(l.point.y == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(l.direction.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(l.direction.y == doctest::Approx(1.0));  // toward the proximal ends
}

TEST_CASE("parallel vertical lines give the midline") {
  const auto v = vshape(seg({0, 0}, {0, 100}), seg({10, 100}, {10, 0}), VShapeKind::Parallel);
  const Line l = center_line(v);
  CHECK(l.point.x == doctest::Approx(5.0));
  CHECK(line_angle(l.direction, {0, 1}) == doctest::Approx(0.0));
}

TEST_CASE("lines y=0 and y=x bisect at 22.5 degrees") {
  const auto v = vshape(seg({100, 0}, {10, 0}), seg({10, 10}, {100, 100}), VShapeKind::Intersecting);
  const Line l = center_line(v);
  CHECK(std::abs(l.point.x) < 1e-9);
  CHECK(std::abs(l.point.y) < 1e-9);
  const double to_a = line_angle(l.direction, {1, 0});
  const double to_b = line_angle(l.direction, {1, 1});
  CHECK(std::abs(to_a - to_b) < 1e-6);
  CHECK(rad_to_deg(to_a) == doctest::Approx(22.5));
}

TEST_CASE("center line bisector and midline properties on random pairs") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec2 apex{200 * u(rng), 200 * u(rng)};
    const double base = std::numbers::pi * u(rng);
    const double half = deg_to_rad(3.0 + 40.0 * std::abs(u(rng)));
    const Vec2 da{std::cos(base - half), std::sin(base - half)};
    const Vec2 db{std::cos(base + half), std::sin(base + half)};
    const auto v = vshape(seg(apex + da * 120.0, apex + da * 15.0),
                          seg(apex + db * 15.0, apex + db * 140.0), VShapeKind::Intersecting);
    const Line l = center_line(v);
    CHECK(std::abs(line_angle(l.direction, da) - line_angle(l.direction, db)) < 1e-6);
    CHECK(dot(l.direction, -(da + db)) > 0.0);

    const Vec2 n = perp(da);
    const double w = 5.0 + 30.0 * std::abs(u(rng));
    const auto p = vshape(seg(apex + da * 100.0, apex), seg(apex + n * w, apex + n * w + da * 80.0),
                          VShapeKind::Parallel);
    const Line m = center_line(p);
    CHECK(std::abs(p.line_a.line().distance(m.point) - p.line_b.line().distance(m.point)) < 1e-6);
    CHECK(line_angle(m.direction, da) < 1e-9);
  }
}

TEST_CASE("key point at the bottom of a drawn V notch") {
  const BinaryImage mask = oracle::fill_polygon(
      200, 320, {{20, 300}, {20, 80}, {70, 80}, {100, 250}, {130, 80}, {180, 80}, {180, 300}});
  const ContourChain chain = trace_boundary(mask);
  const auto segs = fit_polyline(chain, 1.0);
  auto longest_along = [&](Vec2 dir) {
    const LineSegment* best = nullptr;
    for (const auto& s : segs) {
      if (rad_to_deg(line_angle(s.direction(), dir)) > 5.0) continue;
      if (best == nullptr || s.length() > best->length()) best = &s;
    }
    REQUIRE(best != nullptr);
    return *best;
  };
  const auto v = vshape(longest_along({30, 170}), longest_along({30, -170}), VShapeKind::Intersecting);
  const Line l = center_line(v);
  const KeyPoint k = locate_key_point(l, chain, v);
  CHECK(distance(k.position, {100, 250}) <= 1.5);
  // On (within 1 px of) the traced contour.
  double d = 1e9;
  for (const Pixel& p : chain.points) d = std::min(d, distance(Vec2(p), k.position));
  CHECK(d <= 1.0);
}

TEST_CASE("a center line through a chain vertex returns that vertex") {
  ContourChain chain;
  // A V on top of a longer return path, so the short way round is the valley.
  chain.points = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 2}, {5, 1}, {6, 0},
                  {6, -1}, {5, -2}, {4, -3}, {3, -4}, {2, -3}, {1, -2}, {0, -1}};
  VShapePair v;
  v.line_a = {{0, 0}, {2, 2}, SourceSpan{0, 3}};
  v.line_b = {{4, 2}, {6, 0}, SourceSpan{4, 3}};
  v.index = 2;
  const KeyPoint k = locate_key_point(Line{{3, -5}, {0, 1}}, chain, v);
  CHECK(k.position == Vec2(3, 3));
  CHECK(k.valley_index == 2);
}

TEST_CASE("locate_key_point needs spans") {
  ContourChain chain;
  chain.points = {{0, 0}, {1, 0}};
  CHECK_THROWS_AS(locate_key_point(Line{{0, 0}, {0, 1}}, chain, VShapePair{}), Error);
}

TEST_CASE("closed-finger hand: parallel valley located by the midline rule") {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 10 && checked < 3; ++trial) {
    const auto params = synth::random_gesture(synth::Gesture::Closed, rng);
    const auto hand = synth::generate_hand(params, 640, 480);
    PipelineTrace trace;
    const auto r = run_pipeline(hand.image, PipelineConfig{}, &trace);
    if (trace.vshapes.size() != r.report.key_points.size()) continue;
    for (std::size_t i = 0; i < trace.vshapes.size(); ++i) {
      if (trace.vshapes[i].kind != VShapeKind::Parallel) continue;
      CHECK(nearest(hand.truth.valley_points, r.report.key_points[i].position) <= 2.0);
      ++checked;
    }
  }
  CHECK(checked >= 1);
}

TEST_CASE("select_main_keypoints examples") {
  const auto four = kps({{0, 0}, {10, 2}, {20, 0}, {40, 30}});
  CHECK(triangle_height({0, 0}, {10, 2}, {20, 0}) == doctest::Approx(2.0));
  CHECK(triangle_height({10, 2}, {20, 0}, {40, 30}) == doctest::Approx(8.29).epsilon(1e-3));
  CHECK(triangle_height({10, 2}, {20, 0}, {40, 30}) == doctest::Approx(340.0 / std::hypot(30.0, 28.0)));
  const auto sel = select_main_keypoints(four);
  CHECK(sel.first == 0);
  CHECK(sel.points[2].position == Vec2(20, 0));

  const auto three = kps({{1, 1}, {2, 3}, {4, 4}});
  const auto same = select_main_keypoints(three);
  CHECK(same.first == 0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(same.points[i].position == three[i].position);

  CHECK_THROWS_AS(select_main_keypoints(kps({{0, 0}, {1, 1}})), Error);
  CHECK_THROWS_AS(select_main_keypoints(kps({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}})), Error);
}

TEST_CASE("select_main_keypoints ties keep the first triangle") {
  CHECK(select_main_keypoints(kps({{0, 0}, {10, 0}, {20, 0}, {30, 0}})).first == 0);
}

TEST_CASE("select_main_keypoints matches brute force and is similarity invariant") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Vec2> pts;
    for (int i = 0; i < 4; ++i) pts.push_back({u(rng), u(rng)});
    auto height = [](Vec2 a, Vec2 m, Vec2 b) {
      // Twice the triangle area over the base length.
      const double area2 = std::abs((b.x - a.x) * (m.y - a.y) - (b.y - a.y) * (m.x - a.x));
      return area2 / std::hypot(b.x - a.x, b.y - a.y);
    };
    const double h1 = height(pts[0], pts[1], pts[2]);
    const double h2 = height(pts[1], pts[2], pts[3]);
    if (std::abs(h1 - h2) < 1e-6 * (h1 + h2)) continue;
    const std::size_t expected = h2 < h1 ? 1 : 0;
    std::vector<KeyPoint> in;
    for (const Vec2& p : pts) in.push_back({p, in.size()});
    CHECK(select_main_keypoints(in).first == expected);

    const double angle = u(rng);
    const double scale = 0.2 + std::abs(u(rng)) / 20.0;
    const Vec2 shift{u(rng), u(rng)};
    std::vector<KeyPoint> moved;
    for (const Vec2& p : pts) moved.push_back({rotated(p, angle) * scale + shift, moved.size()});
    CHECK(select_main_keypoints(moved).first == expected);
  }
}
