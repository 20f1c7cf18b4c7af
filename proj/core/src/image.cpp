#include "palmroi/image.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

namespace palmroi {

namespace {

struct Component {
  std::size_t area = 0;
  std::size_t first = 0;  // scan-order index of the first pixel
  std::size_t border = 0;  // pixels on the image border
};

/// Labels foreground components with an explicit stack. Labels start at 1;
/// 0 marks background. Components are numbered in scan order of their first
/// pixel.
std::vector<Component> label_components(const BinaryImage& mask, int connectivity,
                                        std::vector<int>& labels) {
  static constexpr std::array<int, 8> kDx{1, 0, -1, 0, 1, -1, -1, 1};
  static constexpr std::array<int, 8> kDy{0, 1, 0, -1, 1, 1, -1, -1};
  const int n_dirs = connectivity == 4 ? 4 : 8;
  const int w = mask.width();
  const int h = mask.height();
  labels.assign(mask.size(), 0);
  std::vector<Component> comps;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i] || labels[i] != 0) continue;
    const int label = static_cast<int>(comps.size()) + 1;
    Component comp;
    comp.first = i;
    labels[i] = label;
    stack.push_back(i);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const int x = static_cast<int>(cur % static_cast<std::size_t>(w));
      const int y = static_cast<int>(cur / static_cast<std::size_t>(w));
      ++comp.area;
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) ++comp.border;
      for (int d = 0; d < n_dirs; ++d) {
        const int nx = x + kDx[d];
        const int ny = y + kDy[d];
        if (!mask.contains(nx, ny)) continue;
        const std::size_t ni = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) +
                               static_cast<std::size_t>(nx);
        if (mask[ni] && labels[ni] == 0) {
          labels[ni] = label;
          stack.push_back(ni);
        }
      }
    }
    comps.push_back(comp);
  }
  return comps;
}

/// Index (1-based label) of the largest component; 0 if none.
int largest_label(const std::vector<Component>& comps) {
  int best = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    // Components are already in scan order, so strict > keeps the earliest.
    if (best == 0 || comps[i].area > comps[static_cast<std::size_t>(best) - 1].area) {
      best = static_cast<int>(i) + 1;
    }
  }
  return best;
}

BinaryImage keep_label(const BinaryImage& mask, const std::vector<int>& labels, int label) {
  BinaryImage out(mask.width(), mask.height(), 0);
  if (label == 0) return out;
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] == label ? 1 : 0;
  return out;
}

struct SideCandidate {
  BinaryImage mask;
  Component comp;
};

SideCandidate largest_on_side(const GrayImage& img, std::uint8_t t, bool bright) {
  BinaryImage side(img.width(), img.height(), 0);
  for (std::size_t i = 0; i < img.size(); ++i) {
    side[i] = (bright ? img[i] > t : img[i] <= t) ? 1 : 0;
  }
  std::vector<int> labels;
  const auto comps = label_components(side, 8, labels);
  const int best = largest_label(comps);
  SideCandidate cand;
  cand.mask = keep_label(side, labels, best);
  if (best != 0) cand.comp = comps[static_cast<std::size_t>(best) - 1];
  return cand;
}

}  // namespace

__extension__ typedef __int128 Int128;

std::uint8_t otsu_threshold(std::span<const std::uint64_t, 256> histogram) {
  std::uint64_t total = 0;
  Int128 sum = 0;
  for (int i = 0; i < 256; ++i) {
    total += histogram[i];
    sum += static_cast<Int128>(i) * histogram[i];
  }
  if (total == 0) throw Error(ErrorCode::ConstantImage, "empty histogram");

  // sigma_b^2 * N^2 = (N * S0 - n0 * S)^2 / (n0 * n1). The numerator is
  // exact in 128-bit, so runs of empty bins yield bit-identical scores.
  std::uint64_t n0 = 0;
  Int128 s0 = 0;
  long double best = -1.0L;
  int best_t = -1;
  for (int t = 0; t < 255; ++t) {
    n0 += histogram[t];
    s0 += static_cast<Int128>(t) * histogram[t];
    const std::uint64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const Int128 diff = static_cast<Int128>(total) * s0 - static_cast<Int128>(n0) * sum;
    const long double d = static_cast<long double>(diff);
    const long double score =
        d * d / (static_cast<long double>(n0) * static_cast<long double>(n1));
    if (score > best) {
      best = score;
      best_t = t;
    }
  }
  if (best_t < 0) throw Error(ErrorCode::ConstantImage, "image has a single intensity level");
  return static_cast<std::uint8_t>(best_t);
}

std::uint8_t otsu_threshold(const GrayImage& img) {
  if (img.empty()) throw Error(ErrorCode::ConstantImage, "empty image");
  std::array<std::uint64_t, 256> hist{};
  for (const auto v : img.data()) ++hist[v];
  return otsu_threshold(std::span<const std::uint64_t, 256>(hist));
}

BinaryImage largest_component(const BinaryImage& mask, int connectivity) {
  std::vector<int> labels;
  const auto comps = label_components(mask, connectivity, labels);
  return keep_label(mask, labels, largest_label(comps));
}

BinaryImage fill_holes(const BinaryImage& mask) {
  const int w = mask.width();
  const int h = mask.height();
  BinaryImage reached(w, h, 0);
  std::vector<Pixel> stack;
  auto seed = [&](int x, int y) {
    if (!mask(x, y) && !reached(x, y)) {
      reached(x, y) = 1;
      stack.push_back({x, y});
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!stack.empty()) {
    const Pixel p = stack.back();
    stack.pop_back();
    const Pixel nbrs[4] = {{p.x + 1, p.y}, {p.x - 1, p.y}, {p.x, p.y + 1}, {p.x, p.y - 1}};
    for (const Pixel& q : nbrs) {
      if (mask.contains(q.x, q.y)) seed(q.x, q.y);
    }
  }
  BinaryImage out(w, h, 0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = reached[i] ? 0 : 1;
  return out;
}

BinaryImage binarize(const GrayImage& img, Polarity polarity) {
  const std::uint8_t t = otsu_threshold(img);
  SideCandidate chosen;
  switch (polarity) {
    case Polarity::ForegroundBright:
      chosen = largest_on_side(img, t, true);
      break;
    case Polarity::ForegroundDark:
      chosen = largest_on_side(img, t, false);
      break;
    case Polarity::Auto: {
      // The object is the side whose main blob touches the frame less; the
      // surround wraps the border.
      auto bright = largest_on_side(img, t, true);
      auto dark = largest_on_side(img, t, false);
      bool pick_bright = true;
      if (bright.comp.border != dark.comp.border) {
        pick_bright = bright.comp.border < dark.comp.border;
      } else if (bright.comp.area != dark.comp.area) {
        pick_bright = bright.comp.area > dark.comp.area;
      }
      chosen = pick_bright ? std::move(bright) : std::move(dark);
      break;
    }
  }
  // Area below 1% of the frame (integer comparison: 100 * area < w * h).
  if (chosen.comp.area * 100 < img.size()) {
    throw Error(ErrorCode::NoForeground, "largest foreground component is below 1% of the image");
  }
  return fill_holes(chosen.mask);
}

std::size_t count_foreground(const BinaryImage& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.data().begin(), mask.data().end(), [](auto v) { return v != 0; }));
}

std::size_t count_components(const BinaryImage& mask, int connectivity) {
  std::vector<int> labels;
  return label_components(mask, connectivity, labels).size();
}

Vec2 foreground_centroid(const BinaryImage& mask) {
  double sx = 0.0;
  double sy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      sx += x;
      sy += y;
      ++n;
    }
  }
  if (n == 0) return {};
  return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

BoundingBox foreground_bbox(const BinaryImage& mask) {
  BoundingBox box{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), -1, -1};
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      box.min_x = std::min(box.min_x, x);
      box.min_y = std::min(box.min_y, y);
      box.max_x = std::max(box.max_x, x);
      box.max_y = std::max(box.max_y, y);
    }
  }
  if (box.max_x < 0) return BoundingBox{};
  return box;
}

}  // namespace palmroi
