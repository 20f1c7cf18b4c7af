#include "palmroi/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "palmroi/error.hpp"

namespace palmroi::synth {

namespace {

constexpr double kPi = std::numbers::pi;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

double gaussian(std::mt19937_64& rng) {
  // Box-Muller on the raw engine output keeps renders reproducible across
  // standard library implementations.
  const double u1 = std::max(uniform01(rng), 1e-300);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

struct Capsule {
  Vec2 base;
  Vec2 tip;
  Vec2 axis;    // unit, base to tip
  Vec2 normal;  // perp(axis): the finger's right-hand side
  double radius = 0.0;

  bool contains(Vec2 q) const { return segment_distance(q, base, tip) <= radius; }
};

struct Valley {
  Vec2 edge_a;    // point on the left finger's right edge
  Vec2 normal_a;  // into the gap
  Vec2 edge_b;    // point on the right finger's left edge
  Vec2 normal_b;  // into the gap
  Vec2 dir;       // centre line, toward the tips
  Vec2 bottom;
  Vec2 fillet_center;
  double fillet_radius = 0.0;
  double chord_level = 0.0;  // relative to fillet_center along dir
  double depth = 0.0;        // fill extent below the bottom
  double angle_deg = 0.0;

  bool fill_contains(Vec2 q) const {
    if (dot(q - edge_a, normal_a) < 0.0) return false;
    if (dot(q - edge_b, normal_b) < 0.0) return false;
    if (dot(q - fillet_center, dir) > chord_level) return false;
    if (dot(q - bottom, dir) < -depth) return false;
    return distance(q, fillet_center) >= fillet_radius;
  }
};

struct Crease {
  std::array<Vec2, 25> pts;
  double depth = 0.0;
  double sigma = 0.0;
  Vec2 lo;
  Vec2 hi;
};

struct Model {
  Vec2 palm_axes;
  std::vector<Capsule> fingers;
  std::vector<Valley> valleys;
  std::vector<Crease> creases;
  std::array<double, 3> phase{};
  Vec2 c0;

  bool in_palm(Vec2 q) const {
    const double x = q.x / palm_axes.x;
    const double y = q.y / palm_axes.y;
    return x * x + y * y <= 1.0;
  }

  bool inside(Vec2 q) const {
    if (in_palm(q)) return true;
    for (const auto& f : fingers) {
      if (f.contains(q)) return true;
    }
    for (const auto& v : valleys) {
      if (v.fill_contains(q)) return true;
    }
    return false;
  }

  double texture(Vec2 q, double level) const {
    double v = level + 14.0 * std::sin(q.x / 0.07 + phase[0]) * std::cos(q.y / 0.09 + phase[1]) +
               8.0 * std::sin((q.x + q.y) / 0.05 + phase[2]);
    for (const auto& c : creases) {
      const double reach = 4.0 * c.sigma;
      if (q.x < c.lo.x - reach || q.x > c.hi.x + reach || q.y < c.lo.y - reach ||
          q.y > c.hi.y + reach) {
        continue;
      }
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i + 1 < c.pts.size(); ++i) {
        d = std::min(d, segment_distance(q, c.pts[i], c.pts[i + 1]));
      }
      v -= c.depth * std::exp(-d * d / (2.0 * c.sigma * c.sigma));
    }
    return v;
  }
};

Capsule make_capsule(Vec2 base, const FingerParams& f) {
  Capsule c;
  const double a = deg_to_rad(f.angle_deg);
  c.axis = {std::sin(a), -std::cos(a)};
  c.normal = perp(c.axis);
  c.base = base;
  c.tip = base + c.axis * f.length;
  c.radius = 0.5 * f.width;
  return c;
}

/// Builds the fillet valley between two neighbouring fingers.
Valley make_valley(const Capsule& left, const Capsule& right, const Vec2& palm_axes,
                   const HandParams& p) {
  Valley v;
  v.edge_a = left.base + left.normal * left.radius;
  v.normal_a = left.normal;
  v.edge_b = right.base - right.normal * right.radius;
  v.normal_b = -right.normal;
  v.dir = normalized(left.axis + right.axis);
  const double cos_a = std::clamp(dot(left.axis, right.axis), -1.0, 1.0);
  v.angle_deg = rad_to_deg(std::acos(cos_a));
  const double s = std::sqrt(std::max(0.0, (1.0 - cos_a) * 0.5));  // sin(angle / 2)

  const Line la{v.edge_a, left.axis};
  const Line lb{v.edge_b, right.axis};
  Vec2 anchor;
  double t_apex = -std::numeric_limits<double>::infinity();
  if (!intersect(la, lb, anchor, 1e-9)) {
    anchor = (v.edge_a + lb.project(v.edge_a)) * 0.5;
  } else {
    t_apex = 0.0;
  }

  auto body = [&](Vec2 q) {
    const double x = q.x / palm_axes.x;
    const double y = q.y / palm_axes.y;
    return x * x + y * y <= 1.0 || left.contains(q) || right.contains(q);
  };
  const Vec2 start = (left.base + right.base) * 0.5;
  const double t_start = dot(start - anchor, v.dir);
  double t = std::max(t_start, t_apex);
  constexpr double kStep = 0.0002;
  for (int i = 0; i < 20000 && body(anchor + v.dir * t); ++i) t += kStep;

  double t_bottom = t + p.valley_margin;
  if (t_apex == 0.0 && s > 0.0) t_bottom = std::max(t_bottom, p.valley_min_halfgap / s);
  v.bottom = anchor + v.dir * t_bottom;
  const double half_gap = la.distance(v.bottom);
  v.fillet_radius = half_gap / (1.0 - s);
  v.fillet_center = v.bottom + v.dir * v.fillet_radius;
  v.chord_level = dot(la.project(v.fillet_center) - v.fillet_center, v.dir);
  v.depth = (t_bottom - t_start) + p.valley_fill_depth;
  return v;
}

Crease make_crease(Vec2 a, Vec2 ctrl, Vec2 b, double depth, double sigma) {
  Crease c;
  c.depth = depth;
  c.sigma = sigma;
  c.lo = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  c.hi = -c.lo;
  for (std::size_t i = 0; i < c.pts.size(); ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(c.pts.size() - 1);
    const double u = 1.0 - t;
    c.pts[i] = a * (u * u) + ctrl * (2.0 * u * t) + b * (t * t);
    c.lo = {std::min(c.lo.x, c.pts[i].x), std::min(c.lo.y, c.pts[i].y)};
    c.hi = {std::max(c.hi.x, c.pts[i].x), std::max(c.hi.y, c.pts[i].y)};
  }
  return c;
}

std::vector<Vec2> outline_samples(const Model& m) {
  std::vector<Vec2> pts;
  for (int i = 0; i < 96; ++i) {
    const double a = 2.0 * kPi * i / 96.0;
    pts.push_back({m.palm_axes.x * std::cos(a), m.palm_axes.y * std::sin(a)});
  }
  for (const auto& f : m.fingers) {
    for (int i = 0; i < 16; ++i) {
      const double a = 2.0 * kPi * i / 16.0;
      const Vec2 off{f.radius * std::cos(a), f.radius * std::sin(a)};
      pts.push_back(f.base + off);
      pts.push_back(f.tip + off);
    }
  }
  return pts;
}

Model build_model(const HandParams& p) {
  Model m;
  m.palm_axes = p.palm_axes;

  const std::size_t first_finger = p.finger_count == 5 ? 1 : 0;
  double total = 0.0;
  for (std::size_t i = first_finger; i < p.fingers.size(); ++i) total += p.fingers[i].width;
  total += p.base_gap * static_cast<double>(p.fingers.size() - first_finger - 1);
  double x = -0.5 * total;
  std::vector<Capsule> all;
  if (first_finger == 1) all.push_back(make_capsule(p.thumb_base, p.fingers[0]));
  for (std::size_t i = first_finger; i < p.fingers.size(); ++i) {
    const double w = p.fingers[i].width;
    all.push_back(make_capsule({x + 0.5 * w, p.base_y}, p.fingers[i]));
    x += w + p.base_gap;
  }

  std::vector<std::size_t> present;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (p.fingers[i].length > 0.0) present.push_back(i);
  }
  for (const auto i : present) m.fingers.push_back(all[i]);
  for (std::size_t k = 0; k + 1 < present.size(); ++k) {
    m.valleys.push_back(make_valley(all[present[k]], all[present[k + 1]], p.palm_axes, p));
  }

  std::mt19937_64 rng(p.texture_seed);
  auto jitter = [&](Vec2 v) {
    return Vec2{v.x + uniform(rng, -0.012, 0.012), v.y + uniform(rng, -0.012, 0.012)};
  };
  const double ax = p.palm_axes.x;
  const double ay = p.palm_axes.y;
  // Principal creases, placed relative to the palm ellipse.
  m.creases.push_back(make_crease(jitter({0.92 * ax, -0.50 * ay}), jitter({0.15 * ax, -0.15 * ay}),
                                  jitter({-0.50 * ax, -0.62 * ay}), 48.0, 0.0055));
  m.creases.push_back(make_crease(jitter({-0.88 * ax, -0.28 * ay}), jitter({-0.05 * ax, 0.02 * ay}),
                                  jitter({0.75 * ax, 0.22 * ay}), 45.0, 0.0055));
  m.creases.push_back(make_crease(jitter({-0.62 * ax, -0.48 * ay}), jitter({-0.85 * ax, 0.40 * ay}),
                                  jitter({-0.15 * ax, 0.92 * ay}), 45.0, 0.0055));
  const int minor = 2 + static_cast<int>(rng() % 3);
  for (int i = 0; i < minor; ++i) {
    const Vec2 a{uniform(rng, -0.6, 0.6) * ax, uniform(rng, -0.6, 0.6) * ay};
    const double ang = uniform(rng, 0.0, kPi);
    const double len = uniform(rng, 0.25, 0.5) * ax;
    const Vec2 d{std::cos(ang) * len, std::sin(ang) * len};
    const Vec2 bend = perp(d) * uniform(rng, -0.3, 0.3);
    m.creases.push_back(make_crease(a - d, a + bend, a + d, uniform(rng, 22.0, 32.0), 0.004));
  }
  for (auto& ph : m.phase) ph = uniform(rng, 0.0, 2.0 * kPi);

  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi = -lo;
  for (const Vec2 q : outline_samples(m)) {
    lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
    hi = {std::max(hi.x, q.x), std::max(hi.y, q.y)};
  }
  m.c0 = (lo + hi) * 0.5;
  return m;
}

struct Pose {
  Vec2 center;
  Vec2 translation;
  double pixels_per_unit = 1.0;
  double cos_r = 1.0;
  double sin_r = 0.0;
  Vec2 c0;

  Vec2 forward(Vec2 q) const {
    const Vec2 d = (q - c0) * pixels_per_unit;
    return center + translation + Vec2{cos_r * d.x - sin_r * d.y, sin_r * d.x + cos_r * d.y};
  }
  Vec2 inverse(Vec2 px) const {
    const Vec2 d = px - center - translation;
    const Vec2 r{cos_r * d.x + sin_r * d.y, -sin_r * d.x + cos_r * d.y};
    return c0 + r / pixels_per_unit;
  }
  Vec2 rotate(Vec2 v) const { return {cos_r * v.x - sin_r * v.y, sin_r * v.x + cos_r * v.y}; }
};

Pose make_pose(const HandParams& p, const Model& m, int width, int height) {
  Pose pose;
  pose.center = {(width - 1) * 0.5, (height - 1) * 0.5};
  pose.translation = p.translation;
  pose.pixels_per_unit = p.scale * height;
  const double r = deg_to_rad(p.rotation_deg);
  pose.cos_r = std::cos(r);
  pose.sin_r = std::sin(r);
  pose.c0 = m.c0;
  return pose;
}

GroundTruth geometry_truth(const HandParams& p, const Model& m, const Pose& pose) {
  GroundTruth gt;
  for (const auto& v : m.valleys) {
    gt.valley_points.push_back(pose.forward(v.bottom));
    gt.valley_radii.push_back(v.fillet_radius * pose.pixels_per_unit);
    gt.valley_angles_deg.push_back(v.angle_deg);
  }
  for (const auto& f : m.fingers) {
    const Vec2 off = f.normal * f.radius;
    FingerEdges e;
    e.left = {pose.forward(f.base - off), pose.forward(f.tip - off)};
    e.right = {pose.forward(f.base + off), pose.forward(f.tip + off)};
    gt.finger_edges.push_back(e);
    gt.finger_axes.push_back(pose.rotate(f.axis));
  }
  (void)p;
  return gt;
}

}  // namespace

HandParams default_hand(bool thumb) {
  HandParams p;
  p.fingers = {
      {0.27, 0.058, -11.0},  // index
      {0.30, 0.060, -3.0},   // middle
      {0.28, 0.057, 5.0},    // ring
      {0.22, 0.050, 14.0},   // little
  };
  if (thumb) {
    p.finger_count = 5;
    p.fingers.insert(p.fingers.begin(), FingerParams{0.25, 0.068, -52.0});
  }
  return p;
}

void validate(const HandParams& p) {
  auto fail = [](const char* msg) { throw Error(ErrorCode::InvalidParams, msg); };
  if (p.finger_count != 4 && p.finger_count != 5) fail("finger_count must be 4 or 5");
  if (p.fingers.size() != static_cast<std::size_t>(p.finger_count)) {
    fail("fingers list does not match finger_count");
  }
  for (const auto& f : p.fingers) {
    if (!(f.length >= 0.0) || !(f.width > 0.0)) fail("finger length must be >= 0 and width > 0");
    if (std::abs(f.angle_deg) > 90.0) fail("finger angle must lie in [-90, 90]");
  }
  for (std::size_t i = 1; i < p.fingers.size(); ++i) {
    if (p.fingers[i].angle_deg < p.fingers[i - 1].angle_deg) {
      fail("adjacent fingers must not cross (gap angle >= 0)");
    }
  }
  if (!(p.scale > 0.0)) fail("scale must be positive");
  if (!(p.palm_axes.x > 0.0) || !(p.palm_axes.y > 0.0)) fail("palm axes must be positive");
  if (!(p.base_gap >= 0.0)) fail("base gap must be non-negative");
  if (!(p.noise_sigma >= 0.0)) fail("noise sigma must be non-negative");
  if (!(p.valley_margin >= 0.0) || !(p.valley_min_halfgap > 0.0)) fail("bad valley shape");
}

Vec2 to_image(const HandParams& p, int width, int height, Vec2 canonical) {
  const Model m = build_model(p);
  return make_pose(p, m, width, height).forward(canonical);
}

bool fits_in_frame(const HandParams& p, int width, int height, double margin) {
  const Model m = build_model(p);
  const Pose pose = make_pose(p, m, width, height);
  for (const Vec2 q : outline_samples(m)) {
    const Vec2 px = pose.forward(q);
    if (px.x < margin || px.y < margin || px.x > width - 1 - margin ||
        px.y > height - 1 - margin) {
      return false;
    }
  }
  return true;
}

GroundTruth ground_truth_geometry(const HandParams& p, int width, int height) {
  validate(p);
  const Model m = build_model(p);
  return geometry_truth(p, m, make_pose(p, m, width, height));
}

SynthHand generate_hand(const HandParams& p, int width, int height) {
  validate(p);
  if (width < 16 || height < 16) throw Error(ErrorCode::InvalidParams, "frame is too small");
  const Model m = build_model(p);
  {
    // At the identity pose the hand must keep a 12.5% margin on every side.
    HandParams identity = p;
    identity.rotation_deg = 0.0;
    identity.scale = 1.0;
    identity.translation = {0.0, 0.0};
    const Pose pose = make_pose(identity, m, width, height);
    for (const Vec2 q : outline_samples(m)) {
      const Vec2 px = pose.forward(q);
      if (px.x < 0.125 * width || px.x > 0.875 * width || px.y < 0.125 * height ||
          px.y > 0.875 * height) {
        throw Error(ErrorCode::InvalidParams, "hand does not fit the frame at identity pose");
      }
    }
  }
  const Pose pose = make_pose(p, m, width, height);

  SynthHand out;
  out.truth = geometry_truth(p, m, pose);
  out.image = GrayImage(width, height);
  out.truth.silhouette = BinaryImage(width, height, 0);

  std::mt19937_64 noise_rng(p.texture_seed ^ 0x9e3779b97f4a7c15ULL);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec2 q = pose.inverse({static_cast<double>(x), static_cast<double>(y)});
      double v = p.background_level;
      if (m.inside(q)) {
        out.truth.silhouette(x, y) = 1;
        v = m.texture(q, p.hand_level);
      }
      if (p.noise_sigma > 0.0) v += p.noise_sigma * gaussian(noise_rng);
      out.image(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  out.truth.hand_scale = foreground_bbox(out.truth.silhouette).longer_side();
  return out;
}

HandParams random_gesture(Gesture gesture, std::mt19937_64& rng) {
  HandParams p = default_hand(gesture == Gesture::Thumb);
  const std::size_t first = gesture == Gesture::Thumb ? 1 : 0;
  for (std::size_t i = first; i < p.fingers.size(); ++i) {
    p.fingers[i].length *= uniform(rng, 0.92, 1.08);
    p.fingers[i].width *= uniform(rng, 0.93, 1.07);
  }
  p.base_gap = uniform(rng, 0.014, 0.02);

  std::array<double, 3> gaps{};
  for (auto& g : gaps) g = uniform(rng, 5.0, 13.0);
  if (gesture == Gesture::Closed) {
    // One or two neighbouring fingers held together.
    const std::size_t k = rng() % 3;
    gaps[k] = uniform(rng, 0.0, 2.0);
    if (rng() % 2 == 0) gaps[(k + 1) % 3] = uniform(rng, 0.0, 2.0);
  }
  const double spread = gaps[0] + gaps[1] + gaps[2];
  double a = -0.5 * spread + uniform(rng, -4.0, 4.0);
  for (std::size_t i = 0; i < 4; ++i) {
    p.fingers[first + i].angle_deg = a;
    if (i < 3) a += gaps[i];
  }
  if (gesture == Gesture::Thumb) {
    p.fingers[0].angle_deg = std::min(uniform(rng, -60.0, -44.0), p.fingers[1].angle_deg);
    p.fingers[0].length *= uniform(rng, 0.95, 1.05);
  }
  p.texture_seed = rng();
  return p;
}

void randomize_pose(HandParams& p, std::mt19937_64& rng, int width, int height, double margin) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    p.rotation_deg = uniform(rng, 0.0, 360.0);
    p.scale = uniform(rng, 0.6, 1.4);
    p.translation = {uniform(rng, -0.15, 0.15) * width, uniform(rng, -0.15, 0.15) * height};
    if (fits_in_frame(p, width, height, margin)) return;
  }
  throw Error(ErrorCode::InvalidParams, "could not place the hand inside the frame");
}

std::vector<FailureCase> failure_corpus(int width, int height) {
  std::vector<FailureCase> out;
  out.push_back({"blank", GrayImage(width, height, 0), "binarize", "ConstantImage"});
  out.push_back({"constant_128", GrayImage(width, height, 128), "binarize", "ConstantImage"});
  out.push_back({"constant_255", GrayImage(width, height, 255), "binarize", "ConstantImage"});

  GrayImage speck(width, height, 40);
  speck(width / 2, height / 2) = 200;
  out.push_back({"single_pixel", speck, "binarize", "NoForeground"});

  GrayImage blob(width, height, 40);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int dx = x - width / 3;
      const int dy = y - height / 3;
      if (dx * dx + dy * dy <= 64) blob(x, y) = 200;
    }
  }
  out.push_back({"tiny_blob", blob, "binarize", "NoForeground"});

  auto with_fingers = [&](std::initializer_list<std::size_t> keep) {
    HandParams p = default_hand(false);
    for (std::size_t i = 0; i < p.fingers.size(); ++i) {
      if (std::find(keep.begin(), keep.end(), i) == keep.end()) p.fingers[i].length = 0.0;
    }
    return generate_hand(p, width, height).image;
  };
  out.push_back({"one_finger", with_fingers({1}), "form_vshapes", "TooFewFingers"});
  out.push_back({"two_fingers", with_fingers({1, 2}), "select_main_keypoints", "TooFewValleys"});
  out.push_back(
      {"three_fingers", with_fingers({0, 1, 2}), "select_main_keypoints", "TooFewValleys"});

  // Fingers stay in view, the palm below the valleys runs off the frame.
  HandParams low = default_hand(false);
  low.scale = 1.3;
  low.translation = {0.0, 0.36 * height};
  out.push_back({"roi_below_frame", generate_hand(low, width, height).image, "extract_roi",
                 "RoiOutOfImage"});
  HandParams high = default_hand(false);
  high.scale = 1.3;
  high.rotation_deg = 180.0;
  high.translation = {0.0, -0.36 * height};
  out.push_back({"roi_above_frame", generate_hand(high, width, height).image, "extract_roi",
                 "RoiOutOfImage"});
  return out;
}

}  // namespace palmroi::synth
