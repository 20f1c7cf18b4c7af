#pragma once

#include <cstdint>
#include <vector>

#include "palmroi/geometry.hpp"
#include "palmroi/grouping.hpp"
#include "palmroi/image.hpp"

namespace palmroi {

/// Palm coordinate system: origin halfway between K1 and K3, y along
/// K1 -> K3, x perpendicular and pointing into the palm.
struct PalmFrame {
  Vec2 origin;
  Vec2 x_axis;
  Vec2 y_axis;
  double scale = 0.0;  // |K3 - K1| in px
};

struct RoiProvenance {
  PalmFrame frame;
  double beta = 0.0;
  double delta = 0.0;
  bool out_of_bounds = false;
  double out_of_bounds_fraction = 0.0;
};

/// Square crop resampled to side x side. Rows run along the frame's x axis
/// (away from the fingers), columns along its y axis (K1 toward K3).
struct RoiImage {
  int side = 0;
  std::vector<std::uint8_t> data;
  RoiProvenance provenance;

  GrayImage as_image() const { return GrayImage(side, side, data); }
};

/// Throws Error(DegenerateFrame) when |K3 - K1| < 4 px.
PalmFrame build_frame(const KeyPoint& k1, const KeyPoint& k2, const KeyPoint& k3,
                      Vec2 hand_centroid);

struct RoiParams {
  double beta = 1.2;   // side length as a multiple of frame.scale
  double delta = 0.8;  // center offset along x_axis, multiple of frame.scale
  int out_side = 128;
};

/// Image-space position of ROI sample (col, row).
Vec2 roi_sample_position(const PalmFrame& frame, const RoiParams& params, int col, int row);

/// Bilinear resampling of the square centred at origin + delta*scale*x_axis
/// with side beta*scale. Samples outside the image read 0; more than 25%
/// outside throws Error(RoiOutOfImage).
RoiImage extract_roi(const GrayImage& img, const PalmFrame& frame, const RoiParams& params);

/// Bilinear lookup; false (and 0) outside [0, w-1] x [0, h-1].
bool sample_bilinear(const GrayImage& img, Vec2 p, double& value);

/// Zero-mean normalised cross-correlation in [-1, 1]. Flat inputs score 1
/// when equal and 0 otherwise. Throws Error(SideMismatch).
double roi_similarity(const RoiImage& a, const RoiImage& b);

}  // namespace palmroi
