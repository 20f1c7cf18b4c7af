#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "palmroi/error.hpp"
#include "palmroi/geometry.hpp"

namespace palmroi {

/// Row-major raster with value semantics. Width and height are at least 1
/// for images produced by the library; a default-constructed raster is 0x0.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}
  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0 ||
        data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw Error(ErrorCode::InvalidParams, "raster data length does not match width x height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  /// Edge-replicated read.
  const T& clamped(int x, int y) const {
    x = x < 0 ? 0 : (x >= width_ ? width_ - 1 : x);
    y = y < 0 ? 0 : (y >= height_ ? height_ - 1 : y);
    return data_[index(x, y)];
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// 8-bit intensities, 0 = dark, 255 = bright.
using GrayImage = Raster<std::uint8_t>;
/// Foreground mask; nonzero = foreground. Values are kept at 0 or 1.
using BinaryImage = Raster<std::uint8_t>;

enum class Polarity { ForegroundBright, ForegroundDark, Auto };

/// Otsu's threshold: the level t maximising between-class variance of the
/// split {<= t, > t}; ties go to the smaller t.
/// Throws Error(ConstantImage) when every pixel has the same value.
std::uint8_t otsu_threshold(const GrayImage& img);

/// Same, over a 256-bin histogram.
std::uint8_t otsu_threshold(std::span<const std::uint64_t, 256> histogram);

/// Keeps only the largest component (4- or 8-connected). Equal areas are
/// resolved toward the component whose first pixel comes first in scan order.
BinaryImage largest_component(const BinaryImage& mask, int connectivity = 8);

/// Sets every background pixel not 4-connected to the image border.
BinaryImage fill_holes(const BinaryImage& mask);

/// Otsu threshold, polarity selection, largest 8-connected component, hole
/// filling. Throws ConstantImage or NoForeground (largest component < 1% of
/// the image area).
BinaryImage binarize(const GrayImage& img, Polarity polarity = Polarity::Auto);

std::size_t count_foreground(const BinaryImage& mask);
std::size_t count_components(const BinaryImage& mask, int connectivity = 8);

/// Centroid of foreground pixels; (0,0) for an empty mask.
Vec2 foreground_centroid(const BinaryImage& mask);

struct BoundingBox {
  int min_x = 0;
  int min_y = 0;
  int max_x = -1;
  int max_y = -1;

  bool empty() const noexcept { return max_x < min_x; }
  int width() const noexcept { return empty() ? 0 : max_x - min_x + 1; }
  int height() const noexcept { return empty() ? 0 : max_y - min_y + 1; }
  int longer_side() const noexcept { return width() > height() ? width() : height(); }
};

BoundingBox foreground_bbox(const BinaryImage& mask);

}  // namespace palmroi
