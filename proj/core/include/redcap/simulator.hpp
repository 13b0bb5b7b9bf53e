#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "redcap/adapters.hpp"
#include "redcap/imagery.hpp"

namespace redcap {

/// One flat-colored rectangle on the synthetic canvas. The fill is inset two
/// pixels inside the annotated box so an occlusion of the exact box always
/// touches contrasting pixels.
struct SceneObject {
  std::string label;
  BBox box;
  Rgb color;
  std::optional<std::string> od_label;  // what the simulated detector reports
  double od_score = 0.9;
};

struct SyntheticScene {
  int width = 0;
  int height = 0;
  Rgb background{230, 230, 230};
  std::vector<SceneObject> objects;
  int jitter = 0;            // detector box jitter in pixels, deterministic
  std::uint64_t seed = 0;    // jitter stream
};

enum class FaultMode { None, Omit, Misclassify, Fabricate };

/// Systematic caption defect injected into the simulated SUT.
struct FaultSpec {
  FaultMode mode = FaultMode::None;
  std::string label;       // Omit
  std::string from, to;    // Misclassify
  std::string trigger, fabricated;  // Fabricate
  double visibility_threshold = 0.5;
};

/// Whether the fault fires on every caption request or only on images that
/// differ from the pristine scene render (models instability that shows up
/// only on transformed inputs).
enum class FaultScope { AllImages, FollowupOnly };

Raster render_scene(const SyntheticScene& scene);

/// Fraction of the object's original fill pixels still showing their exact
/// color in the presented image. 1 for the pristine render, 0 when fully
/// cropped out or occluded.
double visible_fraction(const SyntheticScene& scene, std::size_t object_index,
                        const Raster& presented);

/// Caption of the presented image: every object whose visible fraction meets
/// the threshold, in left-to-right box order, joined as "a X and a Y"; the
/// fault mode is applied afterward. Deterministic.
std::string simulate_caption(const SyntheticScene& scene, const FaultSpec& fault,
                             const Raster& presented);

/// Boxes (jittered when scene.jitter > 0) for every object visible in the
/// presented image; labels come from od_label when set.
std::vector<Detection> simulate_detections(const SyntheticScene& scene,
                                           const Raster& presented);

class SimulatorSut : public CaptionService {
 public:
  SimulatorSut(SyntheticScene scene, FaultSpec fault,
               FaultScope scope = FaultScope::AllImages);
  std::string caption(const Raster& image) override;
  const Raster& pristine() const noexcept { return pristine_; }

 private:
  SyntheticScene scene_;
  FaultSpec fault_;
  FaultScope scope_;
  Raster pristine_;
};

class SimulatorOd : public DetectionService {
 public:
  explicit SimulatorOd(SyntheticScene scene) : scene_(std::move(scene)) {}
  std::vector<Detection> detect(const Raster& image) override {
    return simulate_detections(scene_, image);
  }

 private:
  SyntheticScene scene_;
};

/// A scene plus the fault wiring stored beside it in fixture files.
struct SceneFixture {
  std::string id;
  SyntheticScene scene;
  FaultSpec fault;
  FaultScope scope = FaultScope::AllImages;
};

SceneFixture load_scene(const std::filesystem::path& file);
void save_scene(const SceneFixture& fixture, const std::filesystem::path& file);

/// Deterministic corpus generator for desk-scale verification runs.
struct CorpusOptions {
  int count = 100;
  std::uint64_t seed = 1;
  int canvas_width = 176;
  int canvas_height = 128;
  int min_side = 32;
  int max_side = 52;
  int min_objects = 2;
  int max_objects = 3;
  double alias_fraction = 0.0;  // chance one object's od_label is an opaque alias
  FaultMode fault = FaultMode::None;
  FaultScope fault_scope = FaultScope::FollowupOnly;
};

std::vector<SceneFixture> generate_scene_corpus(const CorpusOptions& options);

/// Labels the generator draws from; pairwise unrelated under the fixture
/// lexicon so caption membership is unambiguous.
const std::vector<std::string>& corpus_label_pool();

}  // namespace redcap
