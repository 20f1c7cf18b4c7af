#pragma once

#include <cstddef>
#include <vector>

#include "palmroi/contour.hpp"
#include "palmroi/geometry.hpp"

namespace palmroi {

/// Cyclic index range into a contour chain: `count` points starting at
/// `first`, wrapping past the end of a closed chain.
struct SourceSpan {
  std::size_t first = 0;
  std::size_t count = 0;

  std::size_t last(std::size_t chain_size) const { return (first + count - 1) % chain_size; }
  bool contains(std::size_t index, std::size_t chain_size) const {
    return (index + chain_size - first) % chain_size < count;
  }

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

/// Straight segment approximating a run of contour points. `p0` is the
/// endpoint that comes first along the chain.
struct LineSegment {
  Vec2 p0;
  Vec2 p1;
  SourceSpan span;

  double length() const { return distance(p0, p1); }
  Vec2 direction() const { return normalized(p1 - p0); }
  Vec2 midpoint() const { return (p0 + p1) * 0.5; }
  Line line() const { return {p0, direction()}; }

  friend bool operator==(const LineSegment&, const LineSegment&) = default;
};

/// Greedy strip fitting: each run grows while every point of the run lies
/// within `strip_halfwidth` of the segment joining its first and last point.
/// Consecutive runs share their boundary point. For a closed chain the last
/// run ends back at point 0. Throws Error(ChainTooShort) below 2 points.
std::vector<LineSegment> fit_polyline(const ContourChain& chain, double strip_halfwidth);

/// Largest distance from the span's chain points to the segment.
double max_span_deviation(const LineSegment& seg, const ContourChain& chain);

struct ConnectParams {
  double gap_max = 8.0;        // px between nearest endpoints
  double angle_max_deg = 10.0;  // between supporting lines
  double offset_max = 3.0;     // endpoint to the other supporting line
};

/// The pairwise merge test applied by connect_broken.
bool can_merge(const LineSegment& a, const LineSegment& b, const ConnectParams& params);

/// Distance between the nearest endpoints of two segments.
double endpoint_gap(const LineSegment& a, const LineSegment& b);

/// Merges mergeable pairs, smallest gap first, until no pair qualifies. A
/// merge keeps the two farthest endpoints and the union of the source spans.
/// `chain_size` (0 for segments not taken from a closed chain) lets spans
/// that wrap past the chain end merge correctly. Output is in span order.
std::vector<LineSegment> connect_broken(std::vector<LineSegment> segments,
                                        const ConnectParams& params,
                                        std::size_t chain_size = 0);

/// Keeps segments with length >= min_length, order preserved.
std::vector<LineSegment> filter_short(const std::vector<LineSegment>& segments,
                                      double min_length);

}  // namespace palmroi
