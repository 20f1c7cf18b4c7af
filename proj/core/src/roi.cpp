#include "palmroi/roi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "palmroi/error.hpp"

namespace palmroi {

PalmFrame build_frame(const KeyPoint& k1, const KeyPoint& /*k2*/, const KeyPoint& k3,
                      Vec2 hand_centroid) {
  const Vec2 span = k3.position - k1.position;
  const double scale = norm(span);
  if (!(scale >= 4.0)) {
    throw Error(ErrorCode::DegenerateFrame, "K1 and K3 are closer than 4 px");
  }
  PalmFrame f;
  f.origin = (k1.position + k3.position) * 0.5;
  f.y_axis = span / scale;
  f.x_axis = perp(f.y_axis);
  if (dot(f.x_axis, hand_centroid - f.origin) < 0.0) f.x_axis = -f.x_axis;
  f.scale = scale;
  return f;
}

Vec2 roi_sample_position(const PalmFrame& frame, const RoiParams& params, int col, int row) {
  const double side = params.beta * frame.scale;
  const double n = params.out_side;
  const Vec2 center = frame.origin + frame.x_axis * (params.delta * frame.scale);
  const double u = ((col + 0.5) / n - 0.5) * side;  // along y_axis
  const double v = ((row + 0.5) / n - 0.5) * side;  // along x_axis
  return center + frame.y_axis * u + frame.x_axis * v;
}

bool sample_bilinear(const GrayImage& img, Vec2 p, double& value) {
  const double max_x = img.width() - 1;
  const double max_y = img.height() - 1;
  if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= max_x && p.y <= max_y)) {
    value = 0.0;
    return false;
  }
  const int x0 = std::min(static_cast<int>(std::floor(p.x)), std::max(img.width() - 2, 0));
  const int y0 = std::min(static_cast<int>(std::floor(p.y)), std::max(img.height() - 2, 0));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = p.x - x0;
  const double fy = p.y - y0;
  const double top = img(x0, y0) * (1.0 - fx) + img(x1, y0) * fx;
  const double bottom = img(x0, y1) * (1.0 - fx) + img(x1, y1) * fx;
  value = top * (1.0 - fy) + bottom * fy;
  return true;
}

RoiImage extract_roi(const GrayImage& img, const PalmFrame& frame, const RoiParams& params) {
  if (!(params.beta > 0.0) || !(params.delta >= 0.0) || params.out_side < 16) {
    throw Error(ErrorCode::InvalidParams, "ROI needs beta > 0, delta >= 0, out_side >= 16");
  }
  RoiImage roi;
  roi.side = params.out_side;
  roi.data.assign(static_cast<std::size_t>(roi.side) * static_cast<std::size_t>(roi.side), 0);
  std::size_t outside = 0;
  for (int row = 0; row < roi.side; ++row) {
    for (int col = 0; col < roi.side; ++col) {
      double v = 0.0;
      if (!sample_bilinear(img, roi_sample_position(frame, params, col, row), v)) ++outside;
      roi.data[static_cast<std::size_t>(row) * static_cast<std::size_t>(roi.side) +
               static_cast<std::size_t>(col)] =
          static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  roi.provenance.frame = frame;
  roi.provenance.beta = params.beta;
  roi.provenance.delta = params.delta;
  roi.provenance.out_of_bounds = outside > 0;
  roi.provenance.out_of_bounds_fraction =
      static_cast<double>(outside) / static_cast<double>(roi.data.size());
  if (outside * 4 > roi.data.size()) {
    throw Error(ErrorCode::RoiOutOfImage,
                "ROI falls outside the image for " +
                    std::to_string(roi.provenance.out_of_bounds_fraction * 100.0) + "% of samples");
  }
  return roi;
}

double roi_similarity(const RoiImage& a, const RoiImage& b) {
  if (a.side != b.side || a.data.size() != b.data.size()) {
    throw Error(ErrorCode::SideMismatch, "ROI sides differ");
  }
  const auto n = static_cast<double>(a.data.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    ma += a.data[i];
    mb += b.data[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double da = a.data[i] - ma;
    const double db = b.data[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    return a.data == b.data ? 1.0 : 0.0;
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace palmroi
