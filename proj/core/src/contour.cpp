#include "palmroi/contour.hpp"

#include <array>
#include <cstdlib>

#include "palmroi/error.hpp"

namespace palmroi {

namespace {

// Clockwise on screen (y down), starting from west.
constexpr std::array<Pixel, 8> kMoore{{
    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1},
}};

int direction_of(Pixel from, Pixel to) {
  const Pixel d{to.x - from.x, to.y - from.y};
  for (int i = 0; i < 8; ++i) {
    if (kMoore[static_cast<std::size_t>(i)] == d) return i;
  }
  return -1;
}

bool foreground(const BinaryImage& mask, Pixel p) {
  return mask.contains(p.x, p.y) && mask(p.x, p.y) != 0;
}

}  // namespace

ContourChain trace_boundary(const BinaryImage& mask) {
  Pixel start{-1, -1};
  for (int y = 0; y < mask.height() && start.x < 0; ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask(x, y)) {
        start = {x, y};
        break;
      }
    }
  }
  if (start.x < 0) throw Error(ErrorCode::EmptyMask, "mask has no foreground pixel");

  ContourChain chain;
  chain.closed = true;
  chain.points.push_back(start);

  // The west neighbour of the scan-order-first pixel is background.
  constexpr int kStartBacktrack = 0;
  Pixel cur = start;
  int backtrack = kStartBacktrack;
  // Each boundary pixel is entered at most once per incident background
  // direction, so 8 * area bounds the walk.
  const std::size_t limit = 8 * mask.size() + 16;
  int first_move = -1;
  for (std::size_t step = 0; step < limit; ++step) {
    int found = -1;
    for (int k = 1; k <= 8; ++k) {
      const int d = (backtrack + k) % 8;
      const Pixel cand{cur.x + kMoore[static_cast<std::size_t>(d)].x,
                       cur.y + kMoore[static_cast<std::size_t>(d)].y};
      if (foreground(mask, cand)) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    // Leaving the start the same way as the first move would replay the
    // whole walk, whatever neighbour we came back in through.
    if (step == 0) {
      first_move = found;
    } else if (cur == start && found == first_move) {
      chain.points.pop_back();
      break;
    }

    const Pixel next{cur.x + kMoore[static_cast<std::size_t>(found)].x,
                     cur.y + kMoore[static_cast<std::size_t>(found)].y};
    const int prev_dir = (found + 7) % 8;
    const Pixel prev{cur.x + kMoore[static_cast<std::size_t>(prev_dir)].x,
                     cur.y + kMoore[static_cast<std::size_t>(prev_dir)].y};
    const int next_backtrack = direction_of(next, prev);

    chain.points.push_back(next);
    cur = next;
    backtrack = next_backtrack;
  }
  return chain;
}

bool is_eight_connected(const ContourChain& chain) {
  auto adjacent = [](Pixel a, Pixel b) {
    const int dx = std::abs(a.x - b.x);
    const int dy = std::abs(a.y - b.y);
    return dx <= 1 && dy <= 1 && (dx + dy) > 0;
  };
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (!adjacent(chain[i - 1], chain[i])) return false;
  }
  if (chain.closed && chain.size() > 1 && !adjacent(chain.points.back(), chain.points.front())) {
    return false;
  }
  return true;
}

}  // namespace palmroi
