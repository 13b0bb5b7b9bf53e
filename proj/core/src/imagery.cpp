#include "redcap/imagery.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "redcap/errors.hpp"

namespace redcap {

Raster::Raster(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw InputDomainError("Raster dimensions must be >= 1, got " +
                           std::to_string(width) + "x" + std::to_string(height));
  }
  px_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < px_.size(); i += 3) {
    px_[i] = fill.r;
    px_[i + 1] = fill.g;
    px_[i + 2] = fill.b;
  }
}

std::string to_string(const BBox& b) {
  std::ostringstream os;
  os << "[" << b.x0 << "," << b.y0 << "," << b.x1 << "," << b.y1 << "]";
  return os.str();
}

BitMask::BitMask(int width, int height, bool value) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw InputDomainError("BitMask dimensions must be >= 1, got " +
                           std::to_string(width) + "x" + std::to_string(height));
  }
  bits_.assign(static_cast<std::size_t>(width) * height, value ? 1 : 0);
}

BitMask mask_from_boxes(const std::vector<BBox>& boxes, int width, int height) {
  BitMask m(width, height);
  for (const BBox& b : boxes) {
    if (!b.valid() || b.x1 > width || b.y1 > height) {
      throw InputDomainError("box " + to_string(b) + " out of bounds for " +
                             std::to_string(width) + "x" + std::to_string(height));
    }
    for (int y = b.y0; y < b.y1; ++y) {
      auto* row = m.bits().data() + static_cast<std::size_t>(y) * width;
      std::fill(row + b.x0, row + b.x1, std::uint8_t{1});
    }
  }
  return m;
}

std::size_t mask_count(const BitMask& m) {
  return std::accumulate(m.bits().begin(), m.bits().end(), std::size_t{0});
}

namespace {
void require_same_dims(const BitMask& a, const BitMask& b, const char* op) {
  if (!a.same_dims(b)) {
    throw InputDomainError(std::string(op) + ": mask dimensions differ (" +
                           std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                           " vs " + std::to_string(b.width()) + "x" +
                           std::to_string(b.height()) + ")");
  }
}
}  // namespace

std::size_t mask_intersection_count(const BitMask& a, const BitMask& b) {
  require_same_dims(a, b, "mask_intersection_count");
  std::size_t n = 0;
  const auto& av = a.bits();
  const auto& bv = b.bits();
  for (std::size_t i = 0; i < av.size(); ++i) n += av[i] & bv[i];
  return n;
}

std::size_t mask_union_count(const BitMask& a, const BitMask& b) {
  require_same_dims(a, b, "mask_union_count");
  std::size_t n = 0;
  const auto& av = a.bits();
  const auto& bv = b.bits();
  for (std::size_t i = 0; i < av.size(); ++i) n += av[i] | bv[i];
  return n;
}

std::vector<BBox> remove_included_boxes(const std::vector<BBox>& boxes) {
  const std::size_t n = boxes.size();
  std::vector<bool> drop(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (boxes[i] == boxes[j]) {
        drop[j] = true;  // duplicates: keep the earliest
      } else if (boxes[i].contains(boxes[j])) {
        drop[i] = true;
      } else if (boxes[j].contains(boxes[i])) {
        drop[j] = true;
      }
    }
  }
  std::vector<BBox> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!drop[i]) out.push_back(boxes[i]);
  }
  return out;
}

void save_pbm(const BitMask& m, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw InputDomainError("cannot open " + file.string() + " for writing");
  os << "P4\n" << m.width() << " " << m.height() << "\n";
  const int row_bytes = (m.width() + 7) / 8;
  std::vector<std::uint8_t> row(row_bytes);
  for (int y = 0; y < m.height(); ++y) {
    std::fill(row.begin(), row.end(), 0);
    for (int x = 0; x < m.width(); ++x) {
      if (m.test(x, y)) row[x / 8] |= static_cast<std::uint8_t>(0x80 >> (x % 8));
    }
    os.write(reinterpret_cast<const char*>(row.data()), row_bytes);
  }
}

BitMask load_pbm(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw InputDomainError("cannot open " + file.string());
  std::string magic;
  int w = 0, h = 0;
  is >> magic >> w >> h;
  if (magic != "P4" || w < 1 || h < 1) {
    throw InputDomainError(file.string() + " is not a P4 PBM");
  }
  is.get();  // single whitespace after the header
  BitMask m(w, h);
  const int row_bytes = (w + 7) / 8;
  std::vector<char> row(row_bytes);
  for (int y = 0; y < h; ++y) {
    is.read(row.data(), row_bytes);
    if (!is) throw InputDomainError("truncated PBM " + file.string());
    for (int x = 0; x < w; ++x) {
      const bool bit = (static_cast<std::uint8_t>(row[x / 8]) >> (7 - x % 8)) & 1;
      m.set(x, y, bit);
    }
  }
  return m;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text, std::uint64_t seed) {
  return fnv1a64(std::span<const std::uint8_t>(
                     reinterpret_cast<const std::uint8_t*>(text.data()), text.size()),
                 seed);
}

std::uint64_t raster_content_hash(const Raster& img) {
  std::uint64_t h = fnv1a64(img.bytes());
  const std::uint32_t dims[2] = {static_cast<std::uint32_t>(img.width()),
                                 static_cast<std::uint32_t>(img.height())};
  h = fnv1a64(std::span<const std::uint8_t>(
                  reinterpret_cast<const std::uint8_t*>(dims), sizeof(dims)),
              h);
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace redcap
