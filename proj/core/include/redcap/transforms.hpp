#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "redcap/imagery.hpp"

namespace redcap {

enum class TransformKind { Crop, Stretch, Rotate };
enum class StretchAxis { Horizontal, Vertical };

std::string to_string(TransformKind k);
std::string to_string(StretchAxis a);

struct CropParams {
  BBox box;
};
struct StretchParams {
  StretchAxis axis = StretchAxis::Horizontal;
  double factor = 0.0;  // > 1, <= 5/3
  double anchor = 0.0;  // fixed coordinate along the axis, in [0, dim]
};
struct RotateParams {
  double angle_deg = 0.0;  // [-30, 30] \ {0}
};

/// One parameterized reduction transformation. Exactly one parameter block is
/// populated, matching `kind`.
struct TransformSpec {
  TransformKind kind = TransformKind::Crop;
  std::variant<CropParams, StretchParams, RotateParams> params;

  static TransformSpec crop(BBox box) { return {TransformKind::Crop, CropParams{box}}; }
  static TransformSpec stretch(StretchAxis axis, double factor, double anchor) {
    return {TransformKind::Stretch, StretchParams{axis, factor, anchor}};
  }
  static TransformSpec rotate(double angle_deg) {
    return {TransformKind::Rotate, RotateParams{angle_deg}};
  }
};

/// Follow-up image plus the survival mask over the source frame: a set bit
/// means the source pixel is still visible after the transformation.
struct TransformResult {
  Raster image;
  BitMask m_tran;
  TransformSpec spec;
};

// MR guideline constants.
inline constexpr double kMinStretchRetained = 0.6;          // 1/factor >= 0.6
inline constexpr double kMaxStretchFactor = 5.0 / 3.0;      // follows from the above
inline constexpr double kMaxRotationDegrees = 30.0;

TransformResult apply_crop(const Raster& src, BBox box);
TransformResult apply_stretch(const Raster& src, StretchAxis axis, double factor,
                              double anchor);
TransformResult apply_rotate(const Raster& src, double angle_deg);
TransformResult apply_transform(const Raster& src, const TransformSpec& spec);

/// Output dimensions after rotating and cropping to the maximal axis-aligned
/// rectangle with the source aspect ratio inscribed in the rotated frame.
std::pair<int, int> rotated_crop_size(int width, int height, double angle_deg);

/// Mean object area fallback when the detector reports nothing: 10% of the
/// image keeps enough space for at least one object.
double default_mean_object_area(int width, int height);

/// Candidate pool for one transform kind.
///   Rotate : the 60 angles {-30..-1, 1..30}.
///   Crop   : 10 top-left points on a fixed uniform grid, bottom-right points
///            iterated with per-axis stride max(1, dim/10); only boxes whose
///            area exceeds mean_od_area survive.
///   Stretch: both axes x factors (1, 5/3] in steps of 1/30 x anchors
///            {0, dim/2, dim}.
/// Deterministic given (src dims, mean_od_area, kind, seed).
std::vector<TransformResult> generate_candidates(const Raster& src, double mean_od_area,
                                                 TransformKind kind, std::uint64_t seed);

}  // namespace redcap
