#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "palmroi/geometry.hpp"
#include "palmroi/image.hpp"

// Parameterised synthetic hands with analytic ground truth.
//
// Geometry is defined in a canonical frame measured in units of the image
// height (so a scene renders identically at any resolution), with y pointing
// down and the fingers pointing toward -y. The global rotation / scale /
// translation then maps canonical points to pixels:
//
//   pixel = image_center + translation + scale * H * R(rotation) * (p - c0)
//
// where c0 is the centre of the canonical hand's bounding box.
namespace palmroi::synth {

struct FingerParams {
  double length = 0.0;     // base centre to tip centre, fraction of image height; 0 = folded
  double width = 0.0;      // fraction of image height
  double angle_deg = 0.0;  // tilt from straight up; positive moves the tip toward +x
};

struct HandParams {
  /// 4 (thumb tucked) or 5 (thumb first, then index..little).
  int finger_count = 4;
  std::vector<FingerParams> fingers;
  /// Gap between neighbouring finger bases (index..little), fraction of H.
  double base_gap = 0.016;
  double base_y = -0.05;
  /// Thumb base centre in canonical units (used when finger_count == 5).
  Vec2 thumb_base{-0.125, 0.045};
  Vec2 palm_axes{0.16, 0.15};
  /// Distance the valley bottom sits past the point where the centre line
  /// leaves the palm and finger bodies, and the minimum half-gap there.
  double valley_margin = 0.008;
  double valley_min_halfgap = 0.006;
  /// How far the valley fill reaches below the finger bases.
  double valley_fill_depth = 0.02;

  double rotation_deg = 0.0;
  double scale = 1.0;
  Vec2 translation{0.0, 0.0};  // px

  double hand_level = 200.0;
  double background_level = 40.0;
  double noise_sigma = 0.0;
  std::uint64_t texture_seed = 1;
};

struct EdgeLine {
  Vec2 start;  // at the finger base
  Vec2 end;    // at the tip
};

struct FingerEdges {
  EdgeLine left;
  EdgeLine right;
};

struct GroundTruth {
  /// Inter-finger valley bottoms, left to right in the canonical layout
  /// (thumb valley first when present). One per pair of adjacent rendered
  /// fingers.
  std::vector<Vec2> valley_points;
  /// Fillet radius of each valley, px.
  std::vector<double> valley_radii;
  /// Angle between the two facing edges of each valley, degrees.
  std::vector<double> valley_angles_deg;
  std::vector<FingerEdges> finger_edges;
  /// Unit finger directions (base to tip) in image space.
  std::vector<Vec2> finger_axes;
  BinaryImage silhouette;
  /// Longer side of the silhouette's bounding box, px.
  double hand_scale = 0.0;
};

struct SynthHand {
  GrayImage image;
  GroundTruth truth;
};

/// Canonical open hand: four fingers, or thumb + four with `thumb`.
HandParams default_hand(bool thumb = false);

/// Throws Error(InvalidParams) when the parameters are out of range.
void validate(const HandParams& p);

/// Renders the hand and its ground truth. Pixel (x, y) is foreground when
/// its centre falls inside the shape; intensities are evaluated at pixel
/// centres, so identical inputs give bit-identical images.
SynthHand generate_hand(const HandParams& p, int width, int height);

/// Ground truth without the raster work (silhouette left empty).
GroundTruth ground_truth_geometry(const HandParams& p, int width, int height);

/// Maps a canonical point to pixel coordinates.
Vec2 to_image(const HandParams& p, int width, int height, Vec2 canonical);

enum class Gesture {
  Open,    // four fingers, every gap clearly open
  Closed,  // at least one pair of touching-parallel fingers (gap angle <= 2 deg)
  Thumb,   // thumb visible
};

/// Random finger layout of the given gesture with identity pose.
HandParams random_gesture(Gesture gesture, std::mt19937_64& rng);

/// Random rotation in [0, 360), scale in [0.6, 1.4] and translation within
/// +-15% of each image dimension, redrawn until the whole hand stays at
/// least `margin` px inside the frame.
void randomize_pose(HandParams& p, std::mt19937_64& rng, int width, int height,
                    double margin = 4.0);

/// True when the posed hand stays `margin` px inside the frame.
bool fits_in_frame(const HandParams& p, int width, int height, double margin);

/// An input the pipeline must reject, with the stage and error code (as the
/// pipeline spells them) it is expected to report.
struct FailureCase {
  std::string name;
  GrayImage image;
  std::string stage;
  std::string error;
};

/// Ten constructed failure inputs: blank and constant frames, specks, hands
/// with too few fingers, and hands whose ROI would leave the frame.
std::vector<FailureCase> failure_corpus(int width, int height);

}  // namespace palmroi::synth
