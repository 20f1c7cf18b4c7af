#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "palmroi/image.hpp"

using namespace palmroi;

namespace {

GrayImage from_rows(std::initializer_list<std::initializer_list<int>> rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.begin()->size());
  GrayImage img(w, h);
  int y = 0;
  for (const auto& r : rows) {
    int x = 0;
    for (int v : r) img(x++, y) = static_cast<std::uint8_t>(v);
    ++y;
  }
  return img;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("raster rejects data of the wrong length") {
  CHECK(code_of([] { GrayImage(3, 3, std::vector<std::uint8_t>(8)); }) ==
        ErrorCode::InvalidParams);
  GrayImage ok(3, 2, std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6});
  CHECK(ok(2, 1) == 6);
  CHECK(ok.clamped(-4, 9) == 4);
}

TEST_CASE("otsu on a two-level image picks the lowest maximising level") {
  CHECK(otsu_threshold(from_rows({{0, 0, 255, 255}})) == 0);
}

TEST_CASE("otsu rejects constant images") {
  CHECK(code_of([] { otsu_threshold(GrayImage(5, 5, 128)); }) == ErrorCode::ConstantImage);
}

TEST_CASE("otsu on a bimodal histogram matches the exhaustive scan") {
  std::array<std::uint64_t, 256> hist{};
  for (int i = 0; i < 256; ++i) {
    hist[i] = static_cast<std::uint64_t>(1000.0 * std::exp(-0.5 * std::pow((i - 50) / 8.0, 2)) +
                                         1000.0 * std::exp(-0.5 * std::pow((i - 200) / 8.0, 2)));
  }
  const int t = otsu_threshold(std::span<const std::uint64_t, 256>(hist));
  CHECK(t >= 50);
  CHECK(t <= 200);
  CHECK(t == oracle::otsu(hist));
}

TEST_CASE("otsu equals the exhaustive scan on random histograms") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<std::uint64_t, 256> hist{};
    const int levels = 2 + static_cast<int>(rng() % 40);
    for (int k = 0; k < levels; ++k) hist[rng() % 256] += 1 + rng() % 500;
    const bool multi = std::count_if(hist.begin(), hist.end(), [](auto v) { return v > 0; }) > 1;
    if (!multi) continue;
    INFO("trial " << trial);
    CHECK(otsu_threshold(std::span<const std::uint64_t, 256>(hist)) == oracle::otsu(hist));
  }
}

TEST_CASE("largest_component examples") {
  SUBCASE("empty stays empty") {
    const BinaryImage empty(8, 8, 0);
    CHECK(largest_component(empty) == empty);
  }
  SUBCASE("3x3 block beats 2x2 block") {
    BinaryImage m(10, 6, 0);
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x) m(x + 5, y + 2) = 1;
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) m(x, y) = 1;
    const BinaryImage out = largest_component(m);
    CHECK(count_foreground(out) == 9);
    CHECK(out(6, 3) == 1);
    CHECK(out(0, 0) == 0);
  }
  SUBCASE("equal areas keep the scan-order first") {
    BinaryImage m(6, 6, 0);
    m(4, 0) = m(4, 1) = 1;
    m(0, 3) = m(1, 3) = 1;
    const BinaryImage out = largest_component(m);
    CHECK(out(4, 0) == 1);
    CHECK(out(0, 3) == 0);
  }
}

TEST_CASE("largest_component matches union-find labelling") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const double density = 0.3 + 0.3 * (trial % 4) / 3.0;
    const BinaryImage m = oracle::random_mask(rng, 64, 64, density);
    for (int conn : {4, 8}) {
      INFO("trial " << trial << " connectivity " << conn);
      CHECK(largest_component(m, conn) == oracle::largest_component(m, conn));
    }
  }
}

TEST_CASE("count_components agrees with the oracle") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const BinaryImage m = oracle::random_mask(rng, 32, 32, 0.35);
    CHECK(count_components(m, 8) == oracle::component_count(m, 8));
    CHECK(count_components(m, 4) == oracle::component_count(m, 4));
  }
}

TEST_CASE("fill_holes fills enclosed background only") {
  BinaryImage ring(7, 7, 0);
  for (int i = 1; i <= 5; ++i) ring(i, 1) = ring(i, 5) = ring(1, i) = ring(5, i) = 1;
  const BinaryImage filled = fill_holes(ring);
  CHECK(count_foreground(filled) == 25);
  CHECK(filled(0, 0) == 0);
  // A diagonal gap does not leak under 4-connected background flooding.
  ring(5, 5) = 0;
  CHECK(fill_holes(ring)(3, 3) == 1);
}

TEST_CASE("binarize keeps the largest bright component") {
  GrayImage img(40, 40, 10);
  // 300-pixel and 100-pixel bright regions.
  for (int y = 0; y < 15; ++y)
    for (int x = 0; x < 20; ++x) img(x + 2, y + 2) = 220;
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) img(x + 28, y + 28) = 220;
  const BinaryImage m = binarize(img, Polarity::ForegroundBright);
  CHECK(count_foreground(m) == 300);
  CHECK(m(3, 3) == 1);
  CHECK(m(30, 30) == 0);
  CHECK(binarize(img, Polarity::Auto) == m);
}

TEST_CASE("binarize auto polarity handles dark objects on light ground") {
  GrayImage img(50, 40, 230);
  for (int y = 10; y < 30; ++y)
    for (int x = 10; x < 35; ++x) img(x, y) = 30;
  const BinaryImage m = binarize(img);
  CHECK(count_foreground(m) == 20 * 25);
  CHECK(m(10, 10) == 1);
}

TEST_CASE("binarize rejects a lone bright pixel") {
  GrayImage img(20, 20, 0);
  img(4, 4) = 255;
  CHECK(code_of([&] { binarize(img, Polarity::ForegroundBright); }) == ErrorCode::NoForeground);
  CHECK(code_of([] { binarize(GrayImage(20, 20, 7)); }) == ErrorCode::ConstantImage);
}

TEST_CASE("binarize output is one component without holes") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage img = oracle::random_gray(rng, 48, 48);
    // Bias toward a bright blob so a large component exists.
    for (int y = 8; y < 40; ++y)
      for (int x = 8; x < 40; ++x) img(x, y) = static_cast<std::uint8_t>(std::max<int>(img(x, y), 180));
    BinaryImage m;
    try {
      m = binarize(img);
    } catch (const Error&) {
      continue;
    }
    CHECK(oracle::component_count(m, 8) == 1);
    CHECK(fill_holes(m) == m);
  }
}

TEST_CASE("binarize is unchanged by remapping the two levels of a two-level image") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    BinaryImage shape = oracle::random_mask(rng, 30, 30, 0.2);
    for (int y = 5; y < 22; ++y)
      for (int x = 6; x < 25; ++x) shape(x, y) = 1;
    const int lo1 = static_cast<int>(rng() % 100), hi1 = 150 + static_cast<int>(rng() % 100);
    const int lo2 = static_cast<int>(rng() % 100), hi2 = 150 + static_cast<int>(rng() % 100);
    GrayImage a(30, 30), b(30, 30);
    for (std::size_t i = 0; i < shape.size(); ++i) {
      a[i] = static_cast<std::uint8_t>(shape[i] ? hi1 : lo1);
      b[i] = static_cast<std::uint8_t>(shape[i] ? hi2 : lo2);
    }
    CHECK(binarize(a) == binarize(b));
  }
}

TEST_CASE("centroid and bounding box") {
  BinaryImage m(10, 10, 0);
  m(2, 3) = m(4, 3) = m(2, 7) = m(4, 7) = 1;
  const Vec2 c = foreground_centroid(m);
  CHECK(c.x == doctest::Approx(3.0));
  CHECK(c.y == doctest::Approx(5.0));
  const BoundingBox b = foreground_bbox(m);
  CHECK(b.width() == 3);
  CHECK(b.height() == 5);
  CHECK(b.longer_side() == 5);
  CHECK(foreground_bbox(BinaryImage(4, 4, 0)).empty());
}
