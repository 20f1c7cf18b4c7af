#pragma once

#include <cstddef>
#include <vector>

#include "palmroi/geometry.hpp"
#include "palmroi/image.hpp"

namespace palmroi {

/// Ordered boundary pixels. Consecutive points are 8-neighbours; when
/// `closed`, the last point is an 8-neighbour of the first.
struct ContourChain {
  std::vector<Pixel> points;
  bool closed = true;

  std::size_t size() const noexcept { return points.size(); }
  const Pixel& operator[](std::size_t i) const { return points[i]; }
  /// Cyclic access for closed chains.
  const Pixel& at_wrapped(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(points.size());
    return points[static_cast<std::size_t>(((i % n) + n) % n)];
  }
};

/// Moore-neighbour tracing of the outer boundary, clockwise on screen,
/// starting at the first foreground pixel in scan order. Terminates with
/// Jacob's criterion (re-entering the start pixel the way it was first
/// entered). Pixels outside the image count as background.
/// Throws Error(EmptyMask) when the mask has no foreground.
ContourChain trace_boundary(const BinaryImage& mask);

/// True when consecutive points (and last/first, if closed) are 8-neighbours.
bool is_eight_connected(const ContourChain& chain);

}  // namespace palmroi
