#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace redcap {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// 8-bit RGB image, row-major. Immutable by convention once handed to the
/// pipeline; every transform returns a fresh Raster.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, Rgb fill = Rgb{});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return px_.empty(); }

  Rgb at(int x, int y) const {
    const std::size_t i = index(x, y);
    return Rgb{px_[i], px_[i + 1], px_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = index(x, y);
    px_[i] = c.r;
    px_[i + 1] = c.g;
    px_[i + 2] = c.b;
  }

  /// Raw bytes, width*height*3, row-major RGB.
  std::span<const std::uint8_t> bytes() const noexcept { return px_; }
  std::uint8_t* data() noexcept { return px_.data(); }
  const std::uint8_t* data() const noexcept { return px_.data(); }

  bool operator==(const Raster&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> px_;
};

/// Axis-aligned pixel box, half-open: [x0,x1) x [y0,y1).
struct BBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  long long area() const noexcept {
    return static_cast<long long>(width()) * height();
  }
  bool valid() const noexcept { return x0 >= 0 && y0 >= 0 && x0 < x1 && y0 < y1; }
  bool contains(const BBox& o) const noexcept {
    return x0 <= o.x0 && y0 <= o.y0 && x1 >= o.x1 && y1 >= o.y1;
  }
  bool operator==(const BBox&) const = default;
};

std::string to_string(const BBox& b);

/// Binary matrix with image dimensions; one byte per pixel (0/1).
class BitMask {
 public:
  BitMask() = default;
  BitMask(int width, int height, bool value = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return bits_.empty(); }

  bool test(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool v = true) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  std::vector<std::uint8_t>& bits() noexcept { return bits_; }

  bool same_dims(const BitMask& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_;
  }
  bool operator==(const BitMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Union of boxes as a mask. Every box must lie within [0,width)x[0,height);
/// an offending box is named in the error.
BitMask mask_from_boxes(const std::vector<BBox>& boxes, int width, int height);

std::size_t mask_count(const BitMask& m);

/// Count of positions set in both masks. Dimensions must match.
std::size_t mask_intersection_count(const BitMask& a, const BitMask& b);

/// |a| + |b| - |a n b|. Dimensions must match.
std::size_t mask_union_count(const BitMask& a, const BitMask& b);

/// Drops every box that geometrically contains another one (the smaller box
/// is the better location estimate). Exact duplicates count as mutual
/// inclusion and only the earliest survives. Relative order is preserved.
std::vector<BBox> remove_included_boxes(const std::vector<BBox>& boxes);

// --- PNG / PBM serialization ---------------------------------------------

Raster decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const Raster& img);
Raster load_png(const std::filesystem::path& file);
void save_png(const Raster& img, const std::filesystem::path& file);

/// P4 (binary) PBM dump for mask inspection; set bits render black.
void save_pbm(const BitMask& m, const std::filesystem::path& file);
BitMask load_pbm(const std::filesystem::path& file);

// --- content hashing -------------------------------------------------------

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a64(std::string_view text,
                      std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t raster_content_hash(const Raster& img);
std::string hex64(std::uint64_t v);

}  // namespace redcap
