#include "palmroi/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "palmroi/error.hpp"

namespace palmroi {

namespace {

auto segment_key(const LineSegment& s) {
  return std::make_tuple(s.p0.x, s.p0.y, s.p1.x, s.p1.y, s.span.first, s.span.count);
}

/// Length of the part of [lo, hi] (projections of `other` on `base`) that
/// falls within `base`.
double projected_overlap(const LineSegment& base, const LineSegment& other) {
  const Vec2 d = base.direction();
  const double len = base.length();
  double t0 = dot(other.p0 - base.p0, d);
  double t1 = dot(other.p1 - base.p0, d);
  if (t0 > t1) std::swap(t0, t1);
  return std::max(0.0, std::min(t1, len) - std::max(t0, 0.0));
}

/// Sum of both directions after flipping the second onto the first.
Vec2 axial_sum(Vec2 a, Vec2 b) { return dot(a, b) < 0.0 ? a - b : a + b; }

}  // namespace

Vec2 interior_normal(const LineSegment& seg) { return perp(seg.direction()); }

bool is_finger_pair(const LineSegment& a, const LineSegment& b, double hand_scale,
                    const PairingParams& params, double* separation) {
  const Vec2 da = a.direction();
  const Vec2 db = b.direction();
  if (rad_to_deg(line_angle(da, db)) > params.angle_tol_deg) return false;

  const Vec2 axis = normalized(axial_sum(da, db));
  const double sep = std::abs(dot(b.midpoint() - a.midpoint(), perp(axis)));
  if (sep < params.width_min * hand_scale || sep > params.width_max * hand_scale) return false;

  const double shorter = std::min(a.length(), b.length());
  const double overlap = std::min(projected_overlap(a, b), projected_overlap(b, a));
  if (overlap < params.overlap_min * shorter) return false;

  if (params.require_facing) {
    if (dot(b.midpoint() - a.midpoint(), interior_normal(a)) <= 0.0) return false;
    if (dot(a.midpoint() - b.midpoint(), interior_normal(b)) <= 0.0) return false;
  }
  if (separation != nullptr) *separation = sep;
  return true;
}

std::vector<ParallelPair> pair_parallel(const std::vector<LineSegment>& segments,
                                        double hand_scale, const PairingParams& params) {
  struct Candidate {
    double sep;
    std::size_t i;
    std::size_t j;
  };
  // Canonical order makes the result independent of the input order.
  std::vector<LineSegment> segs = segments;
  std::sort(segs.begin(), segs.end(),
            [](const auto& l, const auto& r) { return segment_key(l) < segment_key(r); });

  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      double sep = 0.0;
      if (is_finger_pair(segs[i], segs[j], hand_scale, params, &sep)) cands.push_back({sep, i, j});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& l, const Candidate& r) { return l.sep < r.sep; });

  std::vector<bool> used(segs.size(), false);
  std::vector<ParallelPair> pairs;
  for (const auto& c : cands) {
    if (used[c.i] || used[c.j]) continue;
    used[c.i] = used[c.j] = true;
    ParallelPair p;
    p.left_edge = segs[c.i];
    p.right_edge = segs[c.j];
    p.axis = normalized(axial_sum(segs[c.i].direction(), segs[c.j].direction()));
    pairs.push_back(p);
  }
  if (pairs.empty()) return pairs;

  // Shared left-to-right axis: perpendicular to the length-weighted axial
  // mean of the finger directions (doubled-angle average).
  double c2 = 0.0;
  double s2 = 0.0;
  for (const auto& p : pairs) {
    const double w = p.left_edge.length() + p.right_edge.length();
    const double phi = std::atan2(p.axis.y, p.axis.x);
    c2 += w * std::cos(2.0 * phi);
    s2 += w * std::sin(2.0 * phi);
  }
  const double mean_phi = 0.5 * std::atan2(s2, c2);
  const Vec2 mean_axis{std::cos(mean_phi), std::sin(mean_phi)};
  const Vec2 across = perp(mean_axis);
  for (auto& p : pairs) {
    if (dot(p.axis, mean_axis) < 0.0) p.axis = -p.axis;
    if (dot(p.left_edge.midpoint(), across) > dot(p.right_edge.midpoint(), across)) {
      std::swap(p.left_edge, p.right_edge);
    }
    p.order_key = dot(p.midpoint(), across);
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& l, const auto& r) { return l.order_key < r.order_key; });
  return pairs;
}

std::vector<VShapePair> form_vshapes(std::vector<ParallelPair> pairs, double parallel_tol_deg) {
  if (pairs.size() < 2) {
    throw Error(ErrorCode::TooFewFingers, "need at least two finger pairs to form a valley");
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& l, const auto& r) { return l.order_key < r.order_key; });
  std::vector<VShapePair> out;
  out.reserve(pairs.size() - 1);
  for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
    VShapePair v;
    v.line_a = pairs[i].right_edge;
    v.line_b = pairs[i + 1].left_edge;
    v.index = i;
    const double angle = rad_to_deg(line_angle(v.line_a.direction(), v.line_b.direction()));
    v.kind = angle <= parallel_tol_deg ? VShapeKind::Parallel : VShapeKind::Intersecting;
    out.push_back(v);
  }
  return out;
}

Line center_line(const VShapePair& v) {
  // Proximal ends: the closest pair of endpoints across the two edges.
  const Vec2 a_ends[2] = {v.line_a.p0, v.line_a.p1};
  const Vec2 b_ends[2] = {v.line_b.p0, v.line_b.p1};
  double best = std::numeric_limits<double>::infinity();
  int ia = 0;
  int ib = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double d = distance(a_ends[i], b_ends[j]);
      if (d < best) {
        best = d;
        ia = i;
        ib = j;
      }
    }
  }
  const Vec2 da = normalized(a_ends[ia] - a_ends[1 - ia]);
  const Vec2 db = normalized(b_ends[ib] - b_ends[1 - ib]);
  const Vec2 dir = normalized(da + db);

  const Line la{a_ends[ia], da};
  const Line lb{b_ends[ib], db};
  if (v.kind == VShapeKind::Intersecting) {
    Vec2 apex;
    if (intersect(la, lb, apex)) return {apex, dir};
  }
  const Vec2 ma = v.line_a.midpoint();
  const Vec2 mb = v.line_b.midpoint();
  const Vec2 m1 = (ma + lb.project(ma)) * 0.5;
  const Vec2 m2 = (mb + la.project(mb)) * 0.5;
  return {(m1 + m2) * 0.5, dir};
}

KeyPoint locate_key_point(const Line& center, const ContourChain& chain, const VShapePair& v) {
  const std::size_t n = chain.size();
  if (n == 0 || v.line_a.span.count == 0 || v.line_b.span.count == 0) {
    throw Error(ErrorCode::NoValleyArc, "valley edges carry no source span");
  }
  const std::size_t a_last = v.line_a.span.last(n);
  const std::size_t b_last = v.line_b.span.last(n);
  const std::size_t gap_ab = (v.line_b.span.first + n - a_last) % n;
  const std::size_t gap_ba = (v.line_a.span.first + n - b_last) % n;
  const bool forward = gap_ab <= gap_ba;
  const std::size_t start = forward ? a_last : b_last;
  const std::size_t len = forward ? gap_ab : gap_ba;
  if (2 * len > n) throw Error(ErrorCode::NoValleyArc, "edge spans do not bound a valley arc");

  std::vector<Vec2> arc;
  std::vector<double> dist;
  arc.reserve(len + 1);
  for (std::size_t k = 0; k <= len; ++k) {
    const Vec2 p(chain[(start + k) % n]);
    arc.push_back(p);
    dist.push_back(center.signed_distance(p));
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < arc.size(); ++k) {
    if (std::abs(dist[k]) < std::abs(dist[best])) best = k;
  }
  KeyPoint kp{arc[best], v.index};
  if (dist[best] == 0.0) return kp;

  // Interpolate toward whichever neighbour lies across the line.
  double best_other = std::numeric_limits<double>::infinity();
  for (const std::ptrdiff_t step : {-1, 1}) {
    const auto k = static_cast<std::ptrdiff_t>(best) + step;
    if (k < 0 || k >= static_cast<std::ptrdiff_t>(arc.size())) continue;
    const auto ku = static_cast<std::size_t>(k);
    if ((dist[ku] > 0.0) == (dist[best] > 0.0) || dist[ku] == 0.0) continue;
    if (std::abs(dist[ku]) >= best_other) continue;
    best_other = std::abs(dist[ku]);
    const double t = dist[best] / (dist[best] - dist[ku]);
    kp.position = arc[best] + (arc[ku] - arc[best]) * t;
  }
  return kp;
}

double triangle_height(Vec2 first, Vec2 middle, Vec2 last) {
  const Vec2 base = last - first;
  const double len = norm(base);
  if (len == 0.0) return distance(middle, first);
  return std::abs(cross(base, middle - first)) / len;
}

MainKeyPoints select_main_keypoints(const std::vector<KeyPoint>& points) {
  if (points.size() < 3 || points.size() > 4) {
    throw Error(ErrorCode::WrongKeyPointCount,
                "expected 3 or 4 key points, got " + std::to_string(points.size()));
  }
  MainKeyPoints out;
  if (points.size() == 4) {
    const double h_first = triangle_height(points[0].position, points[1].position, points[2].position);
    const double h_second = triangle_height(points[1].position, points[2].position, points[3].position);
    out.first = h_second < h_first ? 1 : 0;
  }
  for (std::size_t i = 0; i < 3; ++i) out.points[i] = points[out.first + i];
  return out;
}

}  // namespace palmroi
