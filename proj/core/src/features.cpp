#include "palmroi/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "palmroi/error.hpp"

namespace palmroi {

GrayImage smooth(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int sum = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) sum += img.clamped(x + dx, y + dy);
      }
      out(x, y) = static_cast<std::uint8_t>(sum / 9);
    }
  }
  return out;
}

GrayImage smooth(const RoiImage& roi) { return smooth(roi.as_image()); }

GrayImage invert(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = static_cast<std::uint8_t>(255 - img[i]);
  return out;
}

LineResponse line_response(const GrayImage& img) {
  LineResponse r;
  r.width = img.width();
  r.height = img.height();
  r.response.assign(img.size(), 0);
  r.orientation.assign(img.size(), LineOrientation::Horizontal);
  std::array<int, 9> window{};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      std::size_t k = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) window[k++] = img.clamped(x + dx, y + dy);
      }
      int best = 0;
      int best_abs = -1;
      std::size_t best_o = 0;
      for (std::size_t o = 0; o < kLineMasks.size(); ++o) {
        int acc = 0;
        for (std::size_t i = 0; i < 9; ++i) acc += kLineMasks[o][i] * window[i];
        if (std::abs(acc) > best_abs) {
          best_abs = std::abs(acc);
          best = acc;
          best_o = o;
        }
      }
      const std::size_t idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(r.width) +
                              static_cast<std::size_t>(x);
      r.response[idx] = best;
      r.orientation[idx] = static_cast<LineOrientation>(best_o);
    }
  }
  return r;
}

double percentile_level(std::vector<int> samples, double percentile) {
  if (samples.empty()) return std::numeric_limits<double>::infinity();
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  auto idx = static_cast<std::size_t>(std::floor(percentile / 100.0 * n));
  idx = std::min(idx, samples.size() - 1);
  return samples[idx];
}

double resolve_threshold(const LineResponse& resp, const ThresholdSpec& spec) {
  switch (spec.mode) {
    case ThresholdMode::Absolute:
      return spec.value;
    case ThresholdMode::Percentile:
    case ThresholdMode::PositivePercentile: {
      if (!(spec.value > 0.0 && spec.value < 100.0)) {
        throw Error(ErrorCode::InvalidParams, "percentile must lie in (0, 100)");
      }
      std::vector<int> samples;
      samples.reserve(resp.response.size());
      for (const int v : resp.response) {
        if (spec.mode == ThresholdMode::Percentile || v > 0) samples.push_back(v);
      }
      return percentile_level(std::move(samples), spec.value);
    }
  }
  return spec.value;
}

BinaryImage threshold_map(const LineResponse& resp, const ThresholdSpec& spec) {
  const double t = resolve_threshold(resp, spec);
  BinaryImage out(resp.width, resp.height, 0);
  for (std::size_t i = 0; i < resp.response.size(); ++i) out[i] = resp.response[i] >= t ? 1 : 0;
  return out;
}

namespace {

/// Labels 8-connected components; returns the number of labels.
int label8(const BinaryImage& m, std::vector<int>& labels) {
  labels.assign(m.size(), 0);
  int next = 0;
  std::vector<Pixel> stack;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y) || labels[static_cast<std::size_t>(y) * m.width() + x]) continue;
      ++next;
      labels[static_cast<std::size_t>(y) * m.width() + x] = next;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx;
            const int ny = p.y + dy;
            if (!m.contains(nx, ny) || !m(nx, ny)) continue;
            int& l = labels[static_cast<std::size_t>(ny) * m.width() + nx];
            if (l == 0) {
              l = next;
              stack.push_back({nx, ny});
            }
          }
        }
      }
    }
  }
  return next;
}

bool zhang_suen_pass(BinaryImage& img, int sub) {
  auto at = [&](int x, int y) -> int { return img.contains(x, y) && img(x, y) ? 1 : 0; };
  std::vector<std::size_t> marked;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!img(x, y)) continue;
      // P2..P9 clockwise from north.
      const int p[8] = {at(x, y - 1), at(x + 1, y - 1), at(x + 1, y), at(x + 1, y + 1),
                        at(x, y + 1), at(x - 1, y + 1), at(x - 1, y), at(x - 1, y - 1)};
      int b = 0;
      int a = 0;
      for (int i = 0; i < 8; ++i) {
        b += p[i];
        if (p[i] == 0 && p[(i + 1) % 8] == 1) ++a;
      }
      if (b < 2 || b > 6 || a != 1) continue;
      const int p2 = p[0], p4 = p[2], p6 = p[4], p8 = p[6];
      if (sub == 0) {
        if (p2 * p4 * p6 != 0 || p4 * p6 * p8 != 0) continue;
      } else {
        if (p2 * p4 * p8 != 0 || p2 * p6 * p8 != 0) continue;
      }
      marked.push_back(static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width()) +
                       static_cast<std::size_t>(x));
    }
  }
  if (marked.empty()) return false;

  // Spare the first pixel of any component that is marked in full.
  std::vector<int> labels;
  const int n_labels = label8(img, labels);
  std::vector<std::size_t> size(static_cast<std::size_t>(n_labels) + 1, 0);
  std::vector<std::size_t> marked_count(size.size(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) ++size[static_cast<std::size_t>(labels[i])];
  for (const auto i : marked) ++marked_count[static_cast<std::size_t>(labels[i])];
  std::vector<bool> spared(size.size(), false);
  bool deleted = false;
  for (const auto i : marked) {
    const auto l = static_cast<std::size_t>(labels[i]);
    if (marked_count[l] == size[l] && !spared[l]) {
      spared[l] = true;  // `marked` is in scan order
      continue;
    }
    img[i] = 0;
    deleted = true;
  }
  return deleted;
}

}  // namespace

BinaryImage thin(const BinaryImage& map) {
  BinaryImage img = map;
  for (auto& v : img.data()) v = v ? 1 : 0;
  for (;;) {
    bool changed = zhang_suen_pass(img, 0);
    changed = zhang_suen_pass(img, 1) || changed;
    if (!changed) break;
  }
  return img;
}

LineFeatureMap extract_line_features(const RoiImage& roi, const ThresholdSpec& spec) {
  const LineResponse resp = line_response(invert(smooth(roi)));
  LineFeatureMap out;
  out.side = roi.side;
  out.threshold_used = resolve_threshold(resp, spec);
  ThresholdSpec absolute{ThresholdMode::Absolute, out.threshold_used};
  out.data = thin(threshold_map(resp, absolute));
  return out;
}

}  // namespace palmroi
