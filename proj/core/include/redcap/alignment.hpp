#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "redcap/adapters.hpp"
#include "redcap/caption.hpp"
#include "redcap/imagery.hpp"
#include "redcap/semantics.hpp"

namespace redcap {

enum class LocSource { Detector, Occlusion };

struct LocatedObject {
  NounPhrase object;
  BitMask mask;                 // M_loc over the source frame, nonempty
  LocSource source = LocSource::Detector;
  std::vector<BBox> regions;    // the boxes the mask was built from
};

/// Per-object localization results for one source caption. Every caption
/// object lands in exactly one of entries / unlocated.
struct LocalizationMap {
  std::vector<LocatedObject> entries;
  std::vector<NounPhrase> unlocated;

  const LocatedObject* find(const NounPhrase& object) const;
};

/// Handles the occlusion stage needs besides the detector.
struct AlignmentServices {
  CaptionService& sut;
  InpaintService& inpaint;
  TagService& tagger;
};

/// Stage one: an object is located iff at least one detection label is the
/// same category; its mask is the union of all matching boxes. Unmatched
/// objects are returned in `unlocated` for the occlusion stage.
LocalizationMap align_by_detection(const std::vector<NounPhrase>& objects,
                                   const std::vector<Detection>& detections,
                                   const SemanticMatcher& m, int width, int height);

/// Stage two (per object): occlude one detector box at a time with three
/// methods (gaussian blur, black fill, inpaint) and keep the box only when
/// the object is semantically absent from all three captions; nested
/// surviving regions drop the larger box. Empty survivors -> nullopt.
std::optional<std::pair<BitMask, std::vector<BBox>>> occlusion_localize(
    const NounPhrase& object, const Raster& src, const std::vector<BBox>& boxes,
    AlignmentServices& services, const SemanticMatcher& m);

/// Full alignment: extract objects, match against detections (score filter
/// applied), then occlusion-localize the remainder.
LocalizationMap build_localization_map(const Caption& caption, const Raster& src,
                                       DetectionService& od, AlignmentServices& services,
                                       const SemanticMatcher& m, double od_score_min);

/// Occlusion primitives; both modify pixels inside the box only. Blur kernel
/// radius is max(5, ceil(min(box side)/4)) with sigma = radius/2, reads
/// clamped to the box.
Raster blur_box(const Raster& src, const BBox& box);
Raster blackout_box(const Raster& src, const BBox& box);

}  // namespace redcap
