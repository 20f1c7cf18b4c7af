#include "palmroi/export.hpp"

#include <algorithm>
#include <cmath>

namespace palmroi {

using nlohmann::json;

namespace {

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

json line_json(const Line& l) {
  return {{"point", vec_json(l.point)}, {"direction", vec_json(l.direction)}};
}

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kRed{230, 40, 40};

}  // namespace

json to_json(const ContourChain& chain) {
  json pts = json::array();
  for (const auto& p : chain.points) pts.push_back(json::array({p.x, p.y}));
  return {{"closed", chain.closed}, {"points", std::move(pts)}};
}

json to_json(const LineSegment& seg) {
  return {{"p0", vec_json(seg.p0)},
          {"p1", vec_json(seg.p1)},
          {"span", {{"first", seg.span.first}, {"count", seg.span.count}}}};
}

json to_json(const std::vector<LineSegment>& segs) {
  json out = json::array();
  for (const auto& s : segs) out.push_back(to_json(s));
  return out;
}

json grouping_json(const std::vector<ParallelPair>& pairs, const std::vector<VShapePair>& vshapes,
                   const std::vector<Line>& center_lines,
                   const std::vector<KeyPoint>& key_points) {
  json j;
  j["pairs"] = json::array();
  for (const auto& p : pairs) {
    j["pairs"].push_back({{"left_edge", to_json(p.left_edge)},
                          {"right_edge", to_json(p.right_edge)},
                          {"axis", vec_json(p.axis)},
                          {"order_key", p.order_key}});
  }
  j["vshapes"] = json::array();
  for (const auto& v : vshapes) {
    j["vshapes"].push_back({{"index", v.index},
                            {"kind", v.kind == VShapeKind::Parallel ? "parallel" : "intersecting"},
                            {"line_a", to_json(v.line_a)},
                            {"line_b", to_json(v.line_b)}});
  }
  j["center_lines"] = json::array();
  for (const auto& l : center_lines) j["center_lines"].push_back(line_json(l));
  j["key_points"] = json::array();
  for (const auto& k : key_points) {
    j["key_points"].push_back({{"position", vec_json(k.position)}, {"valley_index", k.valley_index}});
  }
  return j;
}

Canvas::Canvas(const GrayImage& background)
    : width_(background.width()), height_(background.height()),
      rgb_(background.size() * 3) {
  for (std::size_t i = 0; i < background.size(); ++i) {
    rgb_[3 * i] = rgb_[3 * i + 1] = rgb_[3 * i + 2] = background[i];
  }
}

void Canvas::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  std::copy(c.begin(), c.end(), rgb_.begin() + static_cast<std::ptrdiff_t>(i));
}

void Canvas::line(Vec2 a, Vec2 b, Rgb c) {
  const double len = distance(a, b);
  const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
  for (int i = 0; i <= steps; ++i) {
    const Vec2 p = a + (b - a) * (static_cast<double>(i) / steps);
    set(static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y)), c);
  }
}

void Canvas::dot(Vec2 p, int radius, Rgb c) {
  const int cx = static_cast<int>(std::lround(p.x));
  const int cy = static_cast<int>(std::lround(p.y));
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) set(cx + dx, cy + dy, c);
    }
  }
}

void Canvas::tint(const BinaryImage& mask, Rgb c, double alpha) {
  for (std::size_t i = 0; i < mask.size() && i * 3 < rgb_.size(); ++i) {
    if (!mask[i]) continue;
    for (int k = 0; k < 3; ++k) {
      const double v = (1.0 - alpha) * rgb_[3 * i + k] + alpha * c[k];
      rgb_[3 * i + k] = static_cast<std::uint8_t>(std::lround(v));
    }
  }
}

Rgb palette(std::size_t i) {
  static constexpr std::array<Rgb, 8> colors{{{255, 80, 80},
                                              {80, 200, 80},
                                              {80, 140, 255},
                                              {255, 200, 40},
                                              {220, 80, 220},
                                              {40, 220, 220},
                                              {255, 140, 40},
                                              {160, 160, 255}}};
  return colors[i % colors.size()];
}

Canvas overlay_contour(const GrayImage& img, const BinaryImage& mask, const ContourChain& chain) {
  Canvas c(img);
  c.tint(mask, {60, 120, 255}, 0.25);
  for (const auto& p : chain.points) c.set(p.x, p.y, kRed);
  if (!chain.points.empty()) c.dot(Vec2(chain.points.front()), 2, {255, 255, 0});
  return c;
}

Canvas overlay_segments(const GrayImage& img, const std::vector<LineSegment>& segs) {
  Canvas c(img);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    c.line(segs[i].p0, segs[i].p1, palette(i));
    c.dot(segs[i].p0, 1, kWhite);
  }
  return c;
}

Canvas overlay_pairs(const GrayImage& img, const std::vector<ParallelPair>& pairs) {
  Canvas c(img);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    c.line(pairs[i].left_edge.p0, pairs[i].left_edge.p1, palette(i));
    c.line(pairs[i].right_edge.p0, pairs[i].right_edge.p1, palette(i));
  }
  return c;
}

Canvas overlay_vshapes(const GrayImage& img, const std::vector<VShapePair>& vshapes,
                       const std::vector<Line>& center_lines,
                       const std::vector<KeyPoint>& key_points) {
  Canvas c(img);
  const double reach = std::hypot(img.width(), img.height()) * 0.15;
  for (std::size_t i = 0; i < vshapes.size(); ++i) {
    c.line(vshapes[i].line_a.p0, vshapes[i].line_a.p1, palette(i));
    c.line(vshapes[i].line_b.p0, vshapes[i].line_b.p1, palette(i));
    if (i < center_lines.size()) {
      const Line& l = center_lines[i];
      c.line(l.point - l.direction * reach, l.point + l.direction * reach, kWhite);
    }
  }
  for (const auto& k : key_points) c.dot(k.position, 3, kRed);
  return c;
}

Canvas overlay_roi(const GrayImage& img, const std::array<KeyPoint, 3>& main,
                   const PalmFrame& frame, const RoiParams& params) {
  Canvas c(img);
  const double half = 0.5 * params.beta * frame.scale;
  const Vec2 center = frame.origin + frame.x_axis * (params.delta * frame.scale);
  const std::array<Vec2, 4> corners{center - frame.y_axis * half - frame.x_axis * half,
                                    center + frame.y_axis * half - frame.x_axis * half,
                                    center + frame.y_axis * half + frame.x_axis * half,
                                    center - frame.y_axis * half + frame.x_axis * half};
  for (std::size_t i = 0; i < 4; ++i) c.line(corners[i], corners[(i + 1) % 4], {80, 255, 80});
  c.line(main[0].position, main[2].position, {255, 200, 40});
  c.line(frame.origin, frame.origin + frame.x_axis * (0.4 * frame.scale), {80, 140, 255});
  for (std::size_t i = 0; i < 3; ++i) c.dot(main[i].position, 3, palette(i));
  return c;
}

}  // namespace palmroi
