#pragma once

// Reference implementations used to cross-check the library. Each one is
// written the slow, obvious way and shares no code with core/.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "palmroi/contour.hpp"
#include "palmroi/features.hpp"
#include "palmroi/image.hpp"
#include "palmroi/polyline.hpp"

namespace oracle {

using palmroi::BinaryImage;
using palmroi::GrayImage;
using palmroi::Pixel;

/// Classical w0*w1*(mu0 - mu1)^2 scan over every threshold; first maximum wins.
inline int otsu(const std::array<std::uint64_t, 256>& hist) {
  long double total = 0;
  for (auto h : hist) total += h;
  int best_t = -1;
  long double best = -1;
  for (int t = 0; t < 255; ++t) {
    long double n0 = 0, s0 = 0, n1 = 0, s1 = 0;
    for (int i = 0; i <= t; ++i) {
      n0 += hist[i];
      s0 += static_cast<long double>(i) * hist[i];
    }
    for (int i = t + 1; i < 256; ++i) {
      n1 += hist[i];
      s1 += static_cast<long double>(i) * hist[i];
    }
    if (n0 == 0 || n1 == 0) continue;
    const long double w0 = n0 / total;
    const long double w1 = n1 / total;
    const long double d = s0 / n0 - s1 / n1;
    const long double var = w0 * w1 * d * d;
    if (var > best) {
      best = var;
      best_t = t;
    }
  }
  return best_t;
}

/// Union-find labelling; keeps the largest component, ties to the one whose
/// first pixel comes first in scan order.
inline BinaryImage largest_component(const BinaryImage& m, int connectivity) {
  const int w = m.width();
  const int h = m.height();
  std::vector<int> parent(m.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m(x, y)) continue;
      const int i = y * w + x;
      if (x > 0 && m(x - 1, y)) unite(i, i - 1);
      if (y > 0 && m(x, y - 1)) unite(i, i - w);
      if (connectivity == 8 && y > 0) {
        if (x > 0 && m(x - 1, y - 1)) unite(i, i - w - 1);
        if (x + 1 < w && m(x + 1, y - 1)) unite(i, i - w + 1);
      }
    }
  }
  std::vector<std::size_t> area(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]) ++area[static_cast<std::size_t>(find(static_cast<int>(i)))];
  }
  // Roots are the smallest index of each component, i.e. its first pixel.
  int best = -1;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (area[i] > 0 && (best < 0 || area[i] > area[static_cast<std::size_t>(best)])) {
      best = static_cast<int>(i);
    }
  }
  BinaryImage out(w, h, 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] && find(static_cast<int>(i)) == best) out[i] = 1;
  }
  return out;
}

inline std::size_t component_count(const BinaryImage& m, int connectivity) {
  BinaryImage rest = m;
  std::size_t n = 0;
  for (;;) {
    const BinaryImage c = oracle::largest_component(rest, connectivity);
    bool any = false;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i]) {
        any = true;
        rest[i] = 0;
      }
    }
    if (!any) return n;
    ++n;
  }
}

/// Foreground pixels with a 4-neighbour in the background or off the image.
inline std::set<Pixel> boundary_set4(const BinaryImage& m) {
  std::set<Pixel> out;
  auto bg = [&](int x, int y) { return !m.contains(x, y) || !m(x, y); };
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m(x, y) && (bg(x - 1, y) || bg(x + 1, y) || bg(x, y - 1) || bg(x, y + 1))) {
        out.insert({x, y});
      }
    }
  }
  return out;
}

/// The four 3x3 line masks built from their description: 2 along the line
/// through the centre, -1 elsewhere. Order: horizontal, vertical, the
/// diagonal rising to the right, the diagonal falling to the right.
inline std::array<std::array<int, 9>, 4> line_masks() {
  std::array<std::array<int, 9>, 4> m{};
  for (int k = 0; k < 4; ++k) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        bool on = false;
        if (k == 0) on = dy == 0;
        if (k == 1) on = dx == 0;
        if (k == 2) on = dx == -dy;
        if (k == 3) on = dx == dy;
        m[static_cast<std::size_t>(k)][static_cast<std::size_t>((dy + 1) * 3 + dx + 1)] =
            on ? 2 : -1;
      }
    }
  }
  return m;
}

/// All four mask responses at (x, y) with edge replication.
inline std::array<int, 4> responses(const GrayImage& img, int x, int y) {
  static const auto masks = line_masks();
  std::array<int, 4> r{};
  for (std::size_t k = 0; k < 4; ++k) {
    int acc = 0;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int sx = std::clamp(x + dx, 0, img.width() - 1);
        const int sy = std::clamp(y + dy, 0, img.height() - 1);
        acc += masks[k][static_cast<std::size_t>((dy + 1) * 3 + dx + 1)] * img(sx, sy);
      }
    }
    r[k] = acc;
  }
  return r;
}

inline GrayImage box_mean(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int s = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          s += img(std::clamp(x + dx, 0, img.width() - 1), std::clamp(y + dy, 0, img.height() - 1));
        }
      }
      out(x, y) = static_cast<std::uint8_t>(s / 9);
    }
  }
  return out;
}

/// Components of the "can merge" graph (transitive closure of the pairwise
/// predicate), as index groups.
inline std::vector<std::vector<std::size_t>> merge_closure(
    const std::vector<palmroi::LineSegment>& segs, const palmroi::ConnectParams& p) {
  const std::size_t n = segs.size();
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && label[j] < label[i] && palmroi::can_merge(segs[i], segs[j], p)) {
          label[i] = label[j];
          changed = true;
        }
      }
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t root = 0; root < n; ++root) {
    std::vector<std::size_t> g;
    for (std::size_t i = 0; i < n; ++i) {
      if (label[i] == root) g.push_back(i);
    }
    if (!g.empty()) groups.push_back(std::move(g));
  }
  return groups;
}

inline BinaryImage random_mask(std::mt19937& rng, int w, int h, double density) {
  std::bernoulli_distribution on(density);
  BinaryImage m(w, h, 0);
  for (auto& v : m.data()) v = on(rng) ? 1 : 0;
  return m;
}

inline GrayImage random_gray(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> v(0, 255);
  GrayImage img(w, h);
  for (auto& p : img.data()) p = static_cast<std::uint8_t>(v(rng));
  return img;
}

/// Rotates 90 degrees clockwise on screen: (x, y) -> (h - 1 - y, x).
template <typename T>
palmroi::Raster<T> rotate_cw(const palmroi::Raster<T>& img) {
  palmroi::Raster<T> out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out(img.height() - 1 - y, x) = img(x, y);
  }
  return out;
}

/// Filled polygon, pixel centres tested with the even-odd rule.
inline BinaryImage fill_polygon(int w, int h, const std::vector<palmroi::Vec2>& poly) {
  BinaryImage m(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool in = false;
      for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const auto& a = poly[i];
        const auto& b = poly[j];
        if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
      }
      m(x, y) = in ? 1 : 0;
    }
  }
  return m;
}

/// Textbook Zhang-Suen: both sub-iterations until nothing changes.
inline BinaryImage zhang_suen(BinaryImage img) {
  auto px = [&](int x, int y) { return img.contains(x, y) && img(x, y) ? 1 : 0; };
  for (bool changed = true; changed;) {
    changed = false;
    for (int step = 0; step < 2; ++step) {
      std::vector<Pixel> doomed;
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
          if (!img(x, y)) continue;
          const int p2 = px(x, y - 1), p3 = px(x + 1, y - 1), p4 = px(x + 1, y),
                    p5 = px(x + 1, y + 1), p6 = px(x, y + 1), p7 = px(x - 1, y + 1),
                    p8 = px(x - 1, y), p9 = px(x - 1, y - 1);
          const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
          const int a = (!p2 && p3) + (!p3 && p4) + (!p4 && p5) + (!p5 && p6) + (!p6 && p7) +
                        (!p7 && p8) + (!p8 && p9) + (!p9 && p2);
          if (b < 2 || b > 6 || a != 1) continue;
          const bool c = step == 0 ? (p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0)
                                   : (p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0);
          if (c) doomed.push_back({x, y});
        }
      }
      for (const Pixel& d : doomed) img(d.x, d.y) = 0;
      changed = changed || !doomed.empty();
    }
  }
  return img;
}

}  // namespace oracle
