#include "redcap/adapters.hpp"

#include <array>

#include "redcap/errors.hpp"

namespace redcap {

Raster inpaint_ring_mean(const Raster& image, const BBox& region) {
  if (!region.valid() || region.x1 > image.width() || region.y1 > image.height()) {
    throw InputDomainError("inpaint region " + to_string(region) + " outside image");
  }
  long long sum[3] = {0, 0, 0};
  long long n = 0;
  auto tally = [&](int x, int y) {
    const Rgb c = image.at(x, y);
    sum[0] += c.r;
    sum[1] += c.g;
    sum[2] += c.b;
    ++n;
  };

  const bool whole_frame = region.x0 == 0 && region.y0 == 0 &&
                           region.x1 == image.width() && region.y1 == image.height();
  if (whole_frame) {
    // Degenerate ring: use the image border itself.
    for (int x = 0; x < image.width(); ++x) {
      tally(x, 0);
      if (image.height() > 1) tally(x, image.height() - 1);
    }
    for (int y = 1; y + 1 < image.height(); ++y) {
      tally(0, y);
      if (image.width() > 1) tally(image.width() - 1, y);
    }
  } else {
    for (int x = region.x0 - 1; x <= region.x1; ++x) {
      if (x < 0 || x >= image.width()) continue;
      if (region.y0 - 1 >= 0) tally(x, region.y0 - 1);
      if (region.y1 < image.height()) tally(x, region.y1);
    }
    for (int y = region.y0; y < region.y1; ++y) {
      if (region.x0 - 1 >= 0) tally(region.x0 - 1, y);
      if (region.x1 < image.width()) tally(region.x1, y);
    }
  }

  Rgb fill{0, 0, 0};
  if (n > 0) {
    fill = Rgb{static_cast<std::uint8_t>((sum[0] + n / 2) / n),
               static_cast<std::uint8_t>((sum[1] + n / 2) / n),
               static_cast<std::uint8_t>((sum[2] + n / 2) / n)};
  }
  Raster out = image;
  for (int y = region.y0; y < region.y1; ++y) {
    for (int x = region.x0; x < region.x1; ++x) {
      out.set(x, y, fill);
    }
  }
  return out;
}

std::string CachingCaptionService::caption(const Raster& image) {
  const std::uint64_t key = raster_content_hash(image);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
  }
  std::string result = upstream_->caption(image);
  std::lock_guard lock(mu_);
  ++misses_;
  cache_.emplace(key, result);
  return result;
}

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back(kB64[v & 63]);
    i += 3;
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::array<std::int8_t, 256> rev;
  rev.fill(-1);
  for (int i = 0; i < 64; ++i) rev[static_cast<unsigned char>(kB64[i])] = static_cast<std::int8_t>(i);

  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  std::uint32_t acc = 0;
  int have = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const std::int8_t v = rev[static_cast<unsigned char>(c)];
    if (v < 0) throw InputDomainError("invalid base64 character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    if (++have == 4) {
      out.push_back((acc >> 16) & 0xff);
      out.push_back((acc >> 8) & 0xff);
      out.push_back(acc & 0xff);
      acc = 0;
      have = 0;
    }
  }
  if (have == 2) {
    out.push_back((acc >> 4) & 0xff);
  } else if (have == 3) {
    out.push_back((acc >> 10) & 0xff);
    out.push_back((acc >> 2) & 0xff);
  } else if (have == 1) {
    throw InputDomainError("truncated base64 input");
  }
  return out;
}

}  // namespace redcap
