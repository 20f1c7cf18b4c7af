#include "palmroi/polyline.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <queue>
#include <utility>
#include <tuple>

#include "palmroi/error.hpp"

namespace palmroi {

namespace {

/// Point-to-segment test without square roots: exact for integer inputs
/// under uniform scaling.
bool within_strip(Vec2 p, Vec2 a, Vec2 b, double h) {
  const Vec2 ab = b - a;
  const Vec2 ap = p - a;
  const double len2 = dot(ab, ab);
  const double t = dot(ap, ab);
  const double h2 = h * h;
  if (t <= 0.0) return dot(ap, ap) <= h2;
  if (t >= len2) {
    const Vec2 bp = p - b;
    return dot(bp, bp) <= h2;
  }
  const double c = cross(ab, ap);
  return c * c <= h2 * len2;
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

SourceSpan span_union(const SourceSpan& a, const SourceSpan& b, std::size_t n) {
  if (n == 0) {
    const std::size_t first = std::min(a.first, b.first);
    const std::size_t end = std::max(a.first + a.count, b.first + b.count);
    return {first, end - first};
  }
  auto covering = [n](const SourceSpan& from, const SourceSpan& to) -> std::size_t {
    const std::size_t to_last = (to.first + to.count - 1) % n;
    return (to_last + n - from.first) % n + 1;
  };
  const std::size_t c_ab = covering(a, b);
  const std::size_t c_ba = covering(b, a);
  const bool ok_ab = c_ab >= a.count && (b.first + n - a.first) % n < c_ab;
  const bool ok_ba = c_ba >= b.count && (a.first + n - b.first) % n < c_ba;
  if (ok_ab && (!ok_ba || c_ab <= c_ba)) return {a.first, c_ab};
  if (ok_ba) return {b.first, c_ba};
  return {a.first, n};
}

LineSegment merge_pair(const LineSegment& a, const LineSegment& b, std::size_t n) {
  const std::array<Vec2, 4> pts{a.p0, a.p1, b.p0, b.p1};
  double best = -1.0;
  Vec2 e0;
  Vec2 e1;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      const double d = distance(pts[i], pts[j]);
      if (d > best) {
        best = d;
        e0 = pts[i];
        e1 = pts[j];
      }
    }
  }
  // Keep the chain direction of the inputs.
  const Vec2 flow = (a.p1 - a.p0) + (b.p1 - b.p0);
  if (dot(e1 - e0, flow) < 0.0) std::swap(e0, e1);
  return {e0, e1, span_union(a.span, b.span, n)};
}

auto order_key(const LineSegment& s) {
  return std::make_tuple(s.span.first, s.span.count, s.p0.x, s.p0.y, s.p1.x, s.p1.y);
}

}  // namespace

std::vector<LineSegment> fit_polyline(const ContourChain& chain, double strip_halfwidth) {
  const std::size_t n = chain.size();
  if (n < 2) throw Error(ErrorCode::ChainTooShort, "contour chain has fewer than 2 points");
  if (!(strip_halfwidth > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "strip half-width must be positive");
  }
  const std::size_t last = chain.closed ? n : n - 1;
  auto point = [&](std::size_t k) { return Vec2(chain[k % n]); };

  auto fits = [&](std::size_t s, std::size_t e) {
    const Vec2 a = point(s);
    const Vec2 b = point(e);
    if (a == b) return false;
    for (std::size_t k = s + 1; k < e; ++k) {
      if (!within_strip(point(k), a, b, strip_halfwidth)) return false;
    }
    return true;
  };

  std::vector<LineSegment> out;
  std::size_t s = 0;
  while (s < last) {
    std::size_t e = s + 1;
    while (e + 1 <= last && fits(s, e + 1)) ++e;
    out.push_back({point(s), point(e), SourceSpan{s % n, e - s + 1}});
    s = e;
  }
  return out;
}

double max_span_deviation(const LineSegment& seg, const ContourChain& chain) {
  double worst = 0.0;
  for (std::size_t k = 0; k < seg.span.count; ++k) {
    const Vec2 p(chain[(seg.span.first + k) % chain.size()]);
    worst = std::max(worst, segment_distance(p, seg.p0, seg.p1));
  }
  return worst;
}

double endpoint_gap(const LineSegment& a, const LineSegment& b) {
  return std::min({distance(a.p0, b.p0), distance(a.p0, b.p1), distance(a.p1, b.p0),
                   distance(a.p1, b.p1)});
}

bool can_merge(const LineSegment& a, const LineSegment& b, const ConnectParams& params) {
  if (endpoint_gap(a, b) > params.gap_max) return false;
  if (rad_to_deg(line_angle(a.p1 - a.p0, b.p1 - b.p0)) > params.angle_max_deg) return false;
  const Line la = a.line();
  const Line lb = b.line();
  return la.distance(b.p0) <= params.offset_max && la.distance(b.p1) <= params.offset_max &&
         lb.distance(a.p0) <= params.offset_max && lb.distance(a.p1) <= params.offset_max;
}

std::vector<LineSegment> connect_broken(std::vector<LineSegment> segments,
                                        const ConnectParams& params, std::size_t chain_size) {
  using Key = decltype(order_key(std::declval<const LineSegment&>()));
  struct Candidate {
    double gap;
    Key ka;
    Key kb;
    std::size_t a;
    std::size_t b;
  };
  // Smallest gap first; ties go to the pair that comes first in span order,
  // which is the order a full rescan of the sorted list would find them in.
  auto later = [](const Candidate& l, const Candidate& r) {
    return std::tie(l.gap, l.ka, l.kb, l.a, l.b) > std::tie(r.gap, r.ka, r.kb, r.a, r.b);
  };
  std::vector<LineSegment> pool = std::move(segments);
  std::vector<bool> alive(pool.size(), true);
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(later)> queue(later);
  auto consider = [&](std::size_t i, std::size_t j) {
    if (!can_merge(pool[i], pool[j], params)) return;
    Key ki = order_key(pool[i]);
    Key kj = order_key(pool[j]);
    if (std::tie(kj, j) < std::tie(ki, i)) {
      std::swap(i, j);
      std::swap(ki, kj);
    }
    queue.push({endpoint_gap(pool[i], pool[j]), ki, kj, i, j});
  };
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) consider(i, j);
  }
  while (!queue.empty()) {
    const Candidate c = queue.top();
    queue.pop();
    if (!alive[c.a] || !alive[c.b]) continue;
    alive[c.a] = alive[c.b] = false;
    pool.push_back(merge_pair(pool[c.a], pool[c.b], chain_size));
    alive.push_back(true);
    const std::size_t merged = pool.size() - 1;
    for (std::size_t k = 0; k < merged; ++k) {
      if (alive[k]) consider(k, merged);
    }
  }
  std::vector<LineSegment> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (alive[i]) out.push_back(pool[i]);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& l, const auto& r) { return order_key(l) < order_key(r); });
  return out;
}

std::vector<LineSegment> filter_short(const std::vector<LineSegment>& segments,
                                      double min_length) {
  std::vector<LineSegment> out;
  for (const auto& s : segments) {
    if (s.length() >= min_length) out.push_back(s);
  }
  return out;
}

}  // namespace palmroi
