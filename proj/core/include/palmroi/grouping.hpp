#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "palmroi/contour.hpp"
#include "palmroi/geometry.hpp"
#include "palmroi/polyline.hpp"

namespace palmroi {

/// The two edges of one finger.
struct ParallelPair {
  LineSegment left_edge;
  LineSegment right_edge;
  Vec2 axis;  // unit, along the finger
  /// Midpoint projected on the common perpendicular shared by every pair
  /// returned from one pair_parallel call.
  double order_key = 0.0;

  Vec2 midpoint() const { return (left_edge.midpoint() + right_edge.midpoint()) * 0.5; }
};

enum class VShapeKind { Intersecting, Parallel };

/// Facing edges of two adjacent fingers: line_a is the right edge of finger
/// `index`, line_b the left edge of finger `index + 1`.
struct VShapePair {
  LineSegment line_a;
  LineSegment line_b;
  VShapeKind kind = VShapeKind::Intersecting;
  std::size_t index = 0;
};

struct KeyPoint {
  Vec2 position;
  std::size_t valley_index = 0;
};

struct PairingParams {
  double angle_tol_deg = 8.0;
  /// Allowed edge separation, as fractions of the hand scale.
  double width_min = 0.05;
  double width_max = 0.22;
  /// Required mutual longitudinal overlap, fraction of the shorter edge.
  double overlap_min = 0.5;
  /// Also require each edge to lie on the other's foreground side, using the
  /// clockwise chain direction carried by the segments. Rejects the two
  /// facing edges of an inter-finger gap.
  bool require_facing = false;
};

/// Unit normal pointing into the foreground for a segment taken from a
/// clockwise (on screen) contour.
Vec2 interior_normal(const LineSegment& seg);

/// Candidate test used by pair_parallel; `hand_scale` in px.
bool is_finger_pair(const LineSegment& a, const LineSegment& b, double hand_scale,
                    const PairingParams& params, double* separation = nullptr);

/// Every qualifying segment pair, each segment used at most once (greedy by
/// increasing separation). Pairs come back sorted by order_key.
std::vector<ParallelPair> pair_parallel(const std::vector<LineSegment>& segments,
                                        double hand_scale, const PairingParams& params);

/// Sorts pairs by order_key and pairs the right edge of each with the left
/// edge of the next. Throws Error(TooFewFingers) for fewer than 2 pairs.
std::vector<VShapePair> form_vshapes(std::vector<ParallelPair> pairs,
                                     double parallel_tol_deg = 3.0);

/// Bisector through the intersection (intersecting kind) or the midline
/// (parallel kind), pointing toward the proximal ends of the two edges.
Line center_line(const VShapePair& v);

/// Point of the valley arc between the two edges' source spans closest to
/// the center line, refined by interpolation where the line crosses the
/// chain. Throws Error(NoValleyArc) when the spans bound no arc.
KeyPoint locate_key_point(const Line& center, const ContourChain& chain, const VShapePair& v);

/// Distance of the middle point from the line through the outer two.
double triangle_height(Vec2 first, Vec2 middle, Vec2 last);

struct MainKeyPoints {
  std::array<KeyPoint, 3> points;
  /// 0 when (P1,P2,P3) was kept, 1 when (P2,P3,P4) was.
  std::size_t first = 0;
};

/// Three points pass through; with four, keeps the adjacent triple whose
/// triangle is flatter (ties keep the first). Throws WrongKeyPointCount
/// otherwise.
MainKeyPoints select_main_keypoints(const std::vector<KeyPoint>& points);

}  // namespace palmroi
