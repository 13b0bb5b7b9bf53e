#include "redcap/alignment.hpp"

#include <cmath>
#include <future>

#include "redcap/errors.hpp"

namespace redcap {

const LocatedObject* LocalizationMap::find(const NounPhrase& object) const {
  for (const auto& e : entries) {
    if (e.object == object) return &e;
  }
  return nullptr;
}

LocalizationMap align_by_detection(const std::vector<NounPhrase>& objects,
                                   const std::vector<Detection>& detections,
                                   const SemanticMatcher& m, int width, int height) {
  LocalizationMap map;
  for (const NounPhrase& obj : objects) {
    std::vector<BBox> matches;
    for (const Detection& d : detections) {
      if (m.same_category(d.label, obj.lemma)) matches.push_back(d.box);
    }
    if (matches.empty()) {
      map.unlocated.push_back(obj);
    } else {
      LocatedObject lo;
      lo.object = obj;
      lo.mask = mask_from_boxes(matches, width, height);
      lo.source = LocSource::Detector;
      lo.regions = std::move(matches);
      map.entries.push_back(std::move(lo));
    }
  }
  return map;
}

Raster blackout_box(const Raster& src, const BBox& box) {
  if (!box.valid() || box.x1 > src.width() || box.y1 > src.height()) {
    throw InputDomainError("occlusion box " + to_string(box) + " outside image");
  }
  Raster out = src;
  for (int y = box.y0; y < box.y1; ++y) {
    for (int x = box.x0; x < box.x1; ++x) {
      out.set(x, y, Rgb{0, 0, 0});
    }
  }
  return out;
}

Raster blur_box(const Raster& src, const BBox& box) {
  if (!box.valid() || box.x1 > src.width() || box.y1 > src.height()) {
    throw InputDomainError("occlusion box " + to_string(box) + " outside image");
  }
  const int radius = std::max(5, static_cast<int>(std::ceil(
                                     std::min(box.width(), box.height()) / 4.0)));
  const double sigma = radius / 2.0;
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  const int bw = box.width();
  const int bh = box.height();
  auto clamp_x = [&](int x) { return std::clamp(x, 0, bw - 1); };
  auto clamp_y = [&](int y) { return std::clamp(y, 0, bh - 1); };

  // Separable passes over the box subimage; reads clamp at the box edge so no
  // pixel outside the box leaks in.
  std::vector<double> tmp(static_cast<std::size_t>(bw) * bh * 3);
  for (int y = 0; y < bh; ++y) {
    for (int x = 0; x < bw; ++x) {
      double acc[3] = {0, 0, 0};
      for (int i = -radius; i <= radius; ++i) {
        const Rgb c = src.at(box.x0 + clamp_x(x + i), box.y0 + y);
        acc[0] += kernel[i + radius] * c.r;
        acc[1] += kernel[i + radius] * c.g;
        acc[2] += kernel[i + radius] * c.b;
      }
      const std::size_t idx = (static_cast<std::size_t>(y) * bw + x) * 3;
      tmp[idx] = acc[0];
      tmp[idx + 1] = acc[1];
      tmp[idx + 2] = acc[2];
    }
  }
  Raster out = src;
  for (int y = 0; y < bh; ++y) {
    for (int x = 0; x < bw; ++x) {
      double acc[3] = {0, 0, 0};
      for (int i = -radius; i <= radius; ++i) {
        const std::size_t idx = (static_cast<std::size_t>(clamp_y(y + i)) * bw + x) * 3;
        acc[0] += kernel[i + radius] * tmp[idx];
        acc[1] += kernel[i + radius] * tmp[idx + 1];
        acc[2] += kernel[i + radius] * tmp[idx + 2];
      }
      out.set(box.x0 + x, box.y0 + y,
              Rgb{static_cast<std::uint8_t>(std::clamp(acc[0] + 0.5, 0.0, 255.0)),
                  static_cast<std::uint8_t>(std::clamp(acc[1] + 0.5, 0.0, 255.0)),
                  static_cast<std::uint8_t>(std::clamp(acc[2] + 0.5, 0.0, 255.0))});
    }
  }
  return out;
}

namespace {

std::vector<NounPhrase> caption_objects(const std::string& text, TagService& tagger) {
  Caption c;
  c.text = text;
  c.tokens = tagger.tag(text);
  return extract_objects(c);
}

}  // namespace

std::optional<std::pair<BitMask, std::vector<BBox>>> occlusion_localize(
    const NounPhrase& object, const Raster& src, const std::vector<BBox>& boxes,
    AlignmentServices& services, const SemanticMatcher& m) {
  std::vector<BBox> regions;
  for (const BBox& box : boxes) {
    const Raster blurred = blur_box(src, box);
    const Raster blacked = blackout_box(src, box);
    const Raster painted = services.inpaint.inpaint(src, box);

    // The three captions for one box are requested concurrently.
    auto cap = [&](const Raster& img) {
      return std::async(std::launch::async, [&] { return services.sut.caption(img); });
    };
    auto f1 = cap(blurred);
    auto f2 = cap(blacked);
    auto f3 = cap(painted);
    std::string captions[3];
    try {
      captions[0] = f1.get();
    } catch (const AdapterError& e) {
      f2.wait();
      f3.wait();
      throw AdapterError(std::string("occlusion variant blur: ") + e.what(), e.payload());
    }
    try {
      captions[1] = f2.get();
    } catch (const AdapterError& e) {
      f3.wait();
      throw AdapterError(std::string("occlusion variant black-fill: ") + e.what(),
                         e.payload());
    }
    try {
      captions[2] = f3.get();
    } catch (const AdapterError& e) {
      throw AdapterError(std::string("occlusion variant inpaint: ") + e.what(), e.payload());
    }

    bool absent_in_all = true;
    for (const std::string& text : captions) {
      if (contains_object(caption_objects(text, services.tagger), object, m)) {
        absent_in_all = false;
        break;
      }
    }
    if (absent_in_all) regions.push_back(box);
  }

  regions = remove_included_boxes(regions);
  if (regions.empty()) return std::nullopt;
  BitMask mask = mask_from_boxes(regions, src.width(), src.height());
  return std::make_pair(std::move(mask), std::move(regions));
}

LocalizationMap build_localization_map(const Caption& caption, const Raster& src,
                                       DetectionService& od, AlignmentServices& services,
                                       const SemanticMatcher& m, double od_score_min) {
  const std::vector<NounPhrase> objects = extract_objects(caption);
  LocalizationMap map;
  if (objects.empty()) return map;

  std::vector<Detection> detections;
  for (Detection& d : od.detect(src)) {
    if (d.score >= od_score_min) detections.push_back(std::move(d));
  }

  map = align_by_detection(objects, detections, m, src.width(), src.height());
  if (map.unlocated.empty()) return map;  // no occlusion calls at all

  std::vector<BBox> boxes;
  boxes.reserve(detections.size());
  for (const Detection& d : detections) boxes.push_back(d.box);

  std::vector<NounPhrase> still_unlocated;
  for (const NounPhrase& obj : map.unlocated) {
    auto located = boxes.empty() ? std::nullopt
                                 : occlusion_localize(obj, src, boxes, services, m);
    if (located) {
      LocatedObject lo;
      lo.object = obj;
      lo.mask = std::move(located->first);
      lo.source = LocSource::Occlusion;
      lo.regions = std::move(located->second);
      map.entries.push_back(std::move(lo));
    } else {
      still_unlocated.push_back(obj);
    }
  }
  map.unlocated = std::move(still_unlocated);
  return map;
}

}  // namespace redcap
