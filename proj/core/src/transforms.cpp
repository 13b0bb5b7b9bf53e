#include "redcap/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "redcap/errors.hpp"

namespace redcap {

namespace {

constexpr double kFactorSlack = 1e-9;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(v + 0.5, 0.0, 255.0));
}

int clamp_index(int v, int hi) { return std::clamp(v, 0, hi - 1); }

Rgb bilinear_sample(const Raster& src, double xs, double ys) {
  const double fx = xs - 0.5;
  const double fy = ys - 0.5;
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const double tx = fx - x0;
  const double ty = fy - y0;
  const Rgb p00 = src.at(clamp_index(x0, src.width()), clamp_index(y0, src.height()));
  const Rgb p10 = src.at(clamp_index(x0 + 1, src.width()), clamp_index(y0, src.height()));
  const Rgb p01 = src.at(clamp_index(x0, src.width()), clamp_index(y0 + 1, src.height()));
  const Rgb p11 = src.at(clamp_index(x0 + 1, src.width()), clamp_index(y0 + 1, src.height()));
  auto mix = [&](std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    const double top = a * (1.0 - tx) + b * tx;
    const double bot = c * (1.0 - tx) + d * tx;
    return to_byte(top * (1.0 - ty) + bot * ty);
  };
  return Rgb{mix(p00.r, p10.r, p01.r, p11.r), mix(p00.g, p10.g, p01.g, p11.g),
             mix(p00.b, p10.b, p01.b, p11.b)};
}

}  // namespace

std::string to_string(TransformKind k) {
  switch (k) {
    case TransformKind::Crop: return "crop";
    case TransformKind::Stretch: return "stretch";
    case TransformKind::Rotate: return "rotate";
  }
  return "?";
}

std::string to_string(StretchAxis a) {
  return a == StretchAxis::Horizontal ? "horizontal" : "vertical";
}

TransformResult apply_crop(const Raster& src, BBox box) {
  if (!box.valid() || box.x1 > src.width() || box.y1 > src.height()) {
    throw InputDomainError("crop box " + to_string(box) + " degenerate or outside " +
                           std::to_string(src.width()) + "x" + std::to_string(src.height()));
  }
  Raster out(box.width(), box.height());
  for (int y = 0; y < box.height(); ++y) {
    for (int x = 0; x < box.width(); ++x) {
      out.set(x, y, src.at(box.x0 + x, box.y0 + y));
    }
  }
  BitMask m = mask_from_boxes({box}, src.width(), src.height());
  return TransformResult{std::move(out), std::move(m), TransformSpec::crop(box)};
}

TransformResult apply_stretch(const Raster& src, StretchAxis axis, double factor,
                              double anchor) {
  if (!(factor > 1.0)) {
    throw GuidelineError("stretch factor must exceed 1, got " + std::to_string(factor));
  }
  if (factor > kMaxStretchFactor + kFactorSlack) {
    throw GuidelineError("stretch factor " + std::to_string(factor) +
                         " retains less than 0.6 of the image");
  }
  const int dim = axis == StretchAxis::Horizontal ? src.width() : src.height();
  if (anchor < 0.0 || anchor > static_cast<double>(dim)) {
    throw InputDomainError("stretch anchor " + std::to_string(anchor) +
                           " outside axis extent [0," + std::to_string(dim) + "]");
  }

  // Output canvas keeps the source dimensions; content is scaled about the
  // anchor and overflow is discarded.
  Raster out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      double xs = x + 0.5;
      double ys = y + 0.5;
      if (axis == StretchAxis::Horizontal) {
        xs = anchor + (xs - anchor) / factor;
      } else {
        ys = anchor + (ys - anchor) / factor;
      }
      out.set(x, y, bilinear_sample(src, xs, ys));
    }
  }

  // Survival mask by forward-mapping source pixel centers.
  BitMask m(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const double c = (axis == StretchAxis::Horizontal ? x : y) + 0.5;
      const double mapped = anchor + factor * (c - anchor);
      const bool inside = mapped >= 0.0 && mapped < static_cast<double>(dim);
      m.set(x, y, inside);
    }
  }
  return TransformResult{std::move(out), std::move(m),
                         TransformSpec::stretch(axis, factor, anchor)};
}

std::pair<int, int> rotated_crop_size(int width, int height, double angle_deg) {
  const double c = std::abs(std::cos(deg_to_rad(angle_deg)));
  const double s = std::abs(std::sin(deg_to_rad(angle_deg)));
  const double w = width, h = height;
  // Largest axis-aligned rectangle with the source aspect ratio whose corners
  // stay inside the rotated frame.
  const double scale = std::min(w / (w * c + h * s), h / (w * s + h * c));
  const int out_w = std::max(1, static_cast<int>(std::floor(w * scale)));
  const int out_h = std::max(1, static_cast<int>(std::floor(h * scale)));
  return {out_w, out_h};
}

TransformResult apply_rotate(const Raster& src, double angle_deg) {
  if (angle_deg == 0.0 || std::abs(angle_deg) > kMaxRotationDegrees) {
    throw GuidelineError("rotation angle " + std::to_string(angle_deg) +
                         " outside [-30,30] \\ {0}");
  }
  const auto [out_w, out_h] = rotated_crop_size(src.width(), src.height(), angle_deg);
  const double theta = deg_to_rad(angle_deg);
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const double cx = src.width() / 2.0;
  const double cy = src.height() / 2.0;
  const double ox = out_w / 2.0;
  const double oy = out_h / 2.0;

  // Dark borders are removed by construction: every output pixel back-maps
  // inside the source frame.
  Raster out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const double xd = x + 0.5 - ox;
      const double yd = y + 0.5 - oy;
      const double xs = cs * xd + sn * yd + cx;
      const double ys = -sn * xd + cs * yd + cy;
      out.set(x, y, bilinear_sample(src, xs, ys));
    }
  }

  BitMask m(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const double xp = x + 0.5 - cx;
      const double yp = y + 0.5 - cy;
      const double xr = cs * xp - sn * yp;
      const double yr = sn * xp + cs * yp;
      m.set(x, y, std::abs(xr) < ox && std::abs(yr) < oy);
    }
  }
  return TransformResult{std::move(out), std::move(m), TransformSpec::rotate(angle_deg)};
}

TransformResult apply_transform(const Raster& src, const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::Crop:
      return apply_crop(src, std::get<CropParams>(spec.params).box);
    case TransformKind::Stretch: {
      const auto& p = std::get<StretchParams>(spec.params);
      return apply_stretch(src, p.axis, p.factor, p.anchor);
    }
    case TransformKind::Rotate:
      return apply_rotate(src, std::get<RotateParams>(spec.params).angle_deg);
  }
  throw InputDomainError("unknown transform kind");
}

double default_mean_object_area(int width, int height) {
  return 0.1 * static_cast<double>(width) * static_cast<double>(height);
}

namespace {

std::vector<int> stride_points(int from, int to, int stride) {
  std::vector<int> pts;
  for (int v = from + stride; v < to; v += stride) pts.push_back(v);
  pts.push_back(to);
  return pts;
}

}  // namespace

std::vector<TransformResult> generate_candidates(const Raster& src, double mean_od_area,
                                                 TransformKind kind,
                                                 std::uint64_t /*seed*/) {
  // The pools are fixed grids, so the seed does not influence them; it is part
  // of the signature so callers can thread one RNG stream through the run.
  std::vector<TransformResult> out;
  const int w = src.width();
  const int h = src.height();

  switch (kind) {
    case TransformKind::Rotate: {
      out.reserve(60);
      for (int a = -30; a <= 30; ++a) {
        if (a == 0) continue;
        out.push_back(apply_rotate(src, static_cast<double>(a)));
      }
      break;
    }
    case TransformKind::Stretch: {
      for (StretchAxis axis : {StretchAxis::Horizontal, StretchAxis::Vertical}) {
        const double dim = axis == StretchAxis::Horizontal ? w : h;
        for (int k = 1; k <= 20; ++k) {
          const double factor = 1.0 + static_cast<double>(k) / 30.0;
          for (double anchor : {0.0, dim / 2.0, dim}) {
            out.push_back(apply_stretch(src, axis, factor, anchor));
          }
        }
      }
      break;
    }
    case TransformKind::Crop: {
      const int sx = std::max(1, w / 10);
      const int sy = std::max(1, h / 10);
      for (int k = 0; k < 10; ++k) {
        const int tx = (k % 5) * w / 5;
        const int ty = (k / 5) * (h / 2);
        if (tx >= w || ty >= h) continue;
        for (int y1 : stride_points(ty, h, sy)) {
          for (int x1 : stride_points(tx, w, sx)) {
            const BBox box{tx, ty, x1, y1};
            if (static_cast<double>(box.area()) > mean_od_area) {
              out.push_back(apply_crop(src, box));
            }
          }
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace redcap
