#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "redcap/caption.hpp"
#include "redcap/imagery.hpp"

namespace redcap {

/// One detected object.
struct Detection {
  std::string label;
  double score = 0.0;  // confidence in [0,1]
  BBox box;
};

// The four external model roles. Implementations must tolerate concurrent
// calls up to their configured in-flight bound.
class CaptionService {
 public:
  virtual ~CaptionService() = default;
  virtual std::string caption(const Raster& image) = 0;
};

class DetectionService {
 public:
  virtual ~DetectionService() = default;
  virtual std::vector<Detection> detect(const Raster& image) = 0;
};

class InpaintService {
 public:
  virtual ~InpaintService() = default;
  virtual Raster inpaint(const Raster& image, const BBox& region) = 0;
};

class TagService {
 public:
  virtual ~TagService() = default;
  virtual std::vector<Token> tag(const std::string& text) = 0;
};

/// Transport selection for one external role.
struct EndpointConfig {
  enum class Transport { Builtin, Process, Http };
  Transport transport = Transport::Builtin;
  std::string command;  // Process: shell command speaking JSON Lines on stdio
  std::string url;      // Http: POST target, e.g. http://host:port/path
  int timeout_ms = 10000;
  int retries = 2;       // additional attempts after the first
  int max_in_flight = 4; // concurrent request bound per endpoint
};

// Wire clients. Request/response schemas are fixed:
//   SUT     {"id","image_png_b64"}        -> {"id","caption"}
//   OD      {"id","image_png_b64"}        -> {"id","objects":[{"label","score","box"}]}
//   Inpaint {"id","image_png_b64","box"}  -> {"id","image_png_b64"}
//   POS     {"id","text"}                 -> {"id","tokens":[{"t","pos","lemma"}]}
std::unique_ptr<CaptionService> make_caption_client(const EndpointConfig& cfg);
std::unique_ptr<DetectionService> make_detection_client(const EndpointConfig& cfg);
/// Builtin transport falls back to ring-mean fill.
std::unique_ptr<InpaintService> make_inpaint_client(const EndpointConfig& cfg);
/// Builtin transport uses the bundled LexiconTagger.
std::unique_ptr<TagService> make_tag_client(const EndpointConfig& cfg,
                                            Lemmatizer lemmatizer = Lemmatizer{});

/// Fallback inpainting: fill the region with the mean color of its 1-pixel
/// outer ring (the image border when the region covers the whole frame).
/// Pixels outside the region are never modified.
Raster inpaint_ring_mean(const Raster& image, const BBox& region);

/// Memoizes captions by image content hash. Occlusion localization repeats
/// captions of identical images; SUTs are assumed deterministic per image.
class CachingCaptionService : public CaptionService {
 public:
  explicit CachingCaptionService(std::shared_ptr<CaptionService> upstream)
      : upstream_(std::move(upstream)) {}

  std::string caption(const Raster& image) override;
  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }

 private:
  std::shared_ptr<CaptionService> upstream_;
  std::mutex mu_;
  std::unordered_map<std::uint64_t, std::string> cache_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace redcap
