#include "redcap/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "json.hpp"
#include "redcap/errors.hpp"

namespace redcap {

namespace {

using nlohmann::json;

BBox fill_region(const BBox& box) {
  // Two-pixel inset, shrunk for tiny boxes so at least one pixel remains.
  const int inset_x = std::min(2, (box.width() - 1) / 2);
  const int inset_y = std::min(2, (box.height() - 1) / 2);
  return BBox{box.x0 + inset_x, box.y0 + inset_y, box.x1 - inset_x, box.y1 - inset_y};
}

std::size_t count_color(const Raster& img, Rgb color) {
  std::size_t n = 0;
  const auto bytes = img.bytes();
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    if (bytes[i] == color.r && bytes[i + 1] == color.g && bytes[i + 2] == color.b) ++n;
  }
  return n;
}

}  // namespace

Raster render_scene(const SyntheticScene& scene) {
  if (scene.width < 1 || scene.height < 1) {
    throw InputDomainError("scene canvas must be at least 1x1");
  }
  Raster img(scene.width, scene.height, scene.background);
  for (const SceneObject& o : scene.objects) {
    if (!o.box.valid() || o.box.x1 > scene.width || o.box.y1 > scene.height) {
      throw InputDomainError("scene object '" + o.label + "' box " + to_string(o.box) +
                             " outside canvas");
    }
    const BBox f = fill_region(o.box);
    for (int y = f.y0; y < f.y1; ++y) {
      for (int x = f.x0; x < f.x1; ++x) {
        img.set(x, y, o.color);
      }
    }
  }
  return img;
}

double visible_fraction(const SyntheticScene& scene, std::size_t object_index,
                        const Raster& presented) {
  if (object_index >= scene.objects.size()) {
    throw InputDomainError("object index out of range");
  }
  const Raster pristine = render_scene(scene);
  const Rgb color = scene.objects[object_index].color;
  const std::size_t full = count_color(pristine, color);
  if (full == 0) return 0.0;
  return static_cast<double>(count_color(presented, color)) / static_cast<double>(full);
}

namespace {

std::vector<std::size_t> visible_objects_in_order(const SyntheticScene& scene,
                                                  const FaultSpec& fault,
                                                  const Raster& presented) {
  const Raster pristine = render_scene(scene);
  std::vector<std::size_t> order(scene.objects.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const BBox& ba = scene.objects[a].box;
    const BBox& bb = scene.objects[b].box;
    if (ba.x0 != bb.x0) return ba.x0 < bb.x0;
    return ba.y0 < bb.y0;
  });

  std::vector<std::size_t> visible;
  for (std::size_t i : order) {
    const Rgb color = scene.objects[i].color;
    const std::size_t full = count_color(pristine, color);
    if (full == 0) continue;
    const double frac =
        static_cast<double>(count_color(presented, color)) / static_cast<double>(full);
    if (frac >= fault.visibility_threshold) visible.push_back(i);
  }
  return visible;
}

}  // namespace

std::string simulate_caption(const SyntheticScene& scene, const FaultSpec& fault,
                             const Raster& presented) {
  std::vector<std::string> labels;
  for (std::size_t i : visible_objects_in_order(scene, fault, presented)) {
    labels.push_back(scene.objects[i].label);
  }

  switch (fault.mode) {
    case FaultMode::None:
      break;
    case FaultMode::Omit:
      std::erase(labels, fault.label);
      break;
    case FaultMode::Misclassify:
      for (auto& l : labels) {
        if (l == fault.from) l = fault.to;
      }
      break;
    case FaultMode::Fabricate: {
      const bool triggered = std::find(labels.begin(), labels.end(), fault.trigger) != labels.end();
      const bool already = std::find(labels.begin(), labels.end(), fault.fabricated) != labels.end();
      if (triggered && !already) labels.push_back(fault.fabricated);
      break;
    }
  }

  std::string caption;
  for (const auto& l : labels) {
    if (!caption.empty()) caption += " and ";
    caption += "a " + l;
  }
  return caption;
}

std::vector<Detection> simulate_detections(const SyntheticScene& scene,
                                           const Raster& presented) {
  std::vector<Detection> out;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& o = scene.objects[i];
    if (visible_fraction(scene, i, presented) < 0.5) continue;
    BBox box = o.box;
    if (scene.jitter > 0) {
      const int j = scene.jitter;
      auto offset = [&](int edge) {
        std::uint64_t h = fnv1a64(o.label, scene.seed ^ (i * 0x9e3779b97f4a7c15ull));
        h = fnv1a64(std::string(1, static_cast<char>('a' + edge)), h);
        return static_cast<int>(h % (2 * j + 1)) - j;
      };
      box.x0 = std::clamp(box.x0 + offset(0), 0, scene.width - 1);
      box.y0 = std::clamp(box.y0 + offset(1), 0, scene.height - 1);
      box.x1 = std::clamp(box.x1 + offset(2), box.x0 + 1, scene.width);
      box.y1 = std::clamp(box.y1 + offset(3), box.y0 + 1, scene.height);
    }
    Detection d;
    d.label = o.od_label.value_or(o.label);
    d.score = o.od_score;
    d.box = box;
    out.push_back(std::move(d));
  }
  return out;
}

SimulatorSut::SimulatorSut(SyntheticScene scene, FaultSpec fault, FaultScope scope)
    : scene_(std::move(scene)), fault_(std::move(fault)), scope_(scope),
      pristine_(render_scene(scene_)) {}

std::string SimulatorSut::caption(const Raster& image) {
  FaultSpec active = fault_;
  if (scope_ == FaultScope::FollowupOnly && image == pristine_) {
    active.mode = FaultMode::None;
  }
  return simulate_caption(scene_, active, image);
}

// --- fixture files -----------------------------------------------------------

namespace {

Rgb rgb_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("color must be [r,g,b]");
  return Rgb{j[0].get<std::uint8_t>(), j[1].get<std::uint8_t>(), j[2].get<std::uint8_t>()};
}

json rgb_to(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

FaultMode fault_mode_from(const std::string& s) {
  if (s == "none") return FaultMode::None;
  if (s == "omit") return FaultMode::Omit;
  if (s == "misclassify") return FaultMode::Misclassify;
  if (s == "fabricate") return FaultMode::Fabricate;
  throw ConfigError("unknown fault mode '" + s + "'");
}

std::string fault_mode_to(FaultMode m) {
  switch (m) {
    case FaultMode::None: return "none";
    case FaultMode::Omit: return "omit";
    case FaultMode::Misclassify: return "misclassify";
    case FaultMode::Fabricate: return "fabricate";
  }
  return "none";
}

}  // namespace

SceneFixture load_scene(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("cannot open scene file " + file.string());
  json j = json::parse(is, nullptr, false);
  if (j.is_discarded()) throw ConfigError("scene file is not valid JSON: " + file.string());

  SceneFixture fx;
  fx.id = file.stem().string();
  if (!j.contains("canvas") || !j["canvas"].is_array() || j["canvas"].size() != 2) {
    throw ConfigError("scene file missing canvas [w,h]: " + file.string());
  }
  fx.scene.width = j["canvas"][0].get<int>();
  fx.scene.height = j["canvas"][1].get<int>();
  if (j.contains("background")) fx.scene.background = rgb_from(j["background"]);
  if (j.contains("jitter")) fx.scene.jitter = j["jitter"].get<int>();
  if (j.contains("seed")) fx.scene.seed = j["seed"].get<std::uint64_t>();
  for (const auto& o : j.value("objects", json::array())) {
    SceneObject so;
    so.label = o.at("label").get<std::string>();
    const auto& b = o.at("box");
    so.box = BBox{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
    so.color = rgb_from(o.at("color"));
    if (o.contains("od_label")) so.od_label = o["od_label"].get<std::string>();
    if (o.contains("od_score")) so.od_score = o["od_score"].get<double>();
    fx.scene.objects.push_back(std::move(so));
  }
  if (j.contains("fault")) {
    const auto& f = j["fault"];
    fx.fault.mode = fault_mode_from(f.value("mode", "none"));
    fx.fault.label = f.value("label", "");
    fx.fault.from = f.value("from", "");
    fx.fault.to = f.value("to", "");
    fx.fault.trigger = f.value("trigger", "");
    fx.fault.fabricated = f.value("fabricated", "");
    fx.fault.visibility_threshold = f.value("visibility_threshold", 0.5);
  }
  if (j.value("fault_scope", "all") == "followup_only") fx.scope = FaultScope::FollowupOnly;
  return fx;
}

void save_scene(const SceneFixture& fx, const std::filesystem::path& file) {
  json j;
  j["canvas"] = {fx.scene.width, fx.scene.height};
  j["background"] = rgb_to(fx.scene.background);
  if (fx.scene.jitter > 0) j["jitter"] = fx.scene.jitter;
  if (fx.scene.seed != 0) j["seed"] = fx.scene.seed;
  j["objects"] = json::array();
  for (const auto& o : fx.scene.objects) {
    json jo;
    jo["label"] = o.label;
    jo["box"] = {o.box.x0, o.box.y0, o.box.x1, o.box.y1};
    jo["color"] = rgb_to(o.color);
    if (o.od_label) jo["od_label"] = *o.od_label;
    if (o.od_score != 0.9) jo["od_score"] = o.od_score;
    j["objects"].push_back(std::move(jo));
  }
  if (fx.fault.mode != FaultMode::None) {
    json f;
    f["mode"] = fault_mode_to(fx.fault.mode);
    if (!fx.fault.label.empty()) f["label"] = fx.fault.label;
    if (!fx.fault.from.empty()) f["from"] = fx.fault.from;
    if (!fx.fault.to.empty()) f["to"] = fx.fault.to;
    if (!fx.fault.trigger.empty()) f["trigger"] = fx.fault.trigger;
    if (!fx.fault.fabricated.empty()) f["fabricated"] = fx.fault.fabricated;
    if (fx.fault.visibility_threshold != 0.5) {
      f["visibility_threshold"] = fx.fault.visibility_threshold;
    }
    j["fault"] = std::move(f);
  }
  if (fx.scope == FaultScope::FollowupOnly) j["fault_scope"] = "followup_only";

  std::ofstream os(file);
  if (!os) throw ConfigError("cannot write scene file " + file.string());
  os << j.dump(2) << "\n";
}

// --- corpus generation ---------------------------------------------------------

const std::vector<std::string>& corpus_label_pool() {
  static const std::vector<std::string> pool = {
      "ball", "box",  "tree",  "car",   "dog",  "cat",   "chair", "table",
      "flower", "vase", "bird", "fish",  "cup",  "bottle", "book",  "lamp",
      "hat",  "clock", "drum", "kite",  "bench", "sign",  "shoe",  "boat"};
  return pool;
}

namespace {

const std::vector<Rgb>& corpus_palette() {
  static const std::vector<Rgb> palette = {
      Rgb{200, 40, 40},  Rgb{40, 160, 40},  Rgb{40, 80, 200},  Rgb{210, 170, 30},
      Rgb{150, 40, 180}, Rgb{30, 170, 170}, Rgb{240, 120, 40}, Rgb{120, 70, 20},
      Rgb{240, 90, 160}, Rgb{90, 220, 90},  Rgb{70, 50, 220},  Rgb{20, 120, 90}};
  return palette;
}

bool boxes_clear(const BBox& a, const BBox& b, int margin) {
  return a.x1 + margin <= b.x0 || b.x1 + margin <= a.x0 || a.y1 + margin <= b.y0 ||
         b.y1 + margin <= a.y0;
}

}  // namespace

std::vector<SceneFixture> generate_scene_corpus(const CorpusOptions& opt) {
  std::vector<SceneFixture> out;
  out.reserve(opt.count);
  const auto& pool = corpus_label_pool();
  const auto& palette = corpus_palette();

  for (int s = 0; s < opt.count; ++s) {
    std::mt19937_64 rng(opt.seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(s));
    SceneFixture fx;
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04d", s);
    fx.id = name;
    fx.scene.width = opt.canvas_width;
    fx.scene.height = opt.canvas_height;

    std::uniform_int_distribution<int> n_dist(opt.min_objects, opt.max_objects);
    const int want = n_dist(rng);

    std::vector<std::string> labels = pool;
    std::shuffle(labels.begin(), labels.end(), rng);
    std::vector<Rgb> colors = palette;
    std::shuffle(colors.begin(), colors.end(), rng);

    std::uniform_int_distribution<int> side(opt.min_side, opt.max_side);
    const int edge_margin = 2;
    for (int i = 0; i < want; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < 60 && !placed; ++attempt) {
        const int w = side(rng);
        // Aspect ratio capped at 1.6 so occlusion blur always defeats the fill.
        const int h_lo = std::max(opt.min_side, static_cast<int>(w / 1.6));
        const int h_hi = std::min(opt.max_side, static_cast<int>(w * 1.6));
        const int h = std::uniform_int_distribution<int>(h_lo, std::max(h_lo, h_hi))(rng);
        if (w + 2 * edge_margin >= fx.scene.width || h + 2 * edge_margin >= fx.scene.height) {
          continue;
        }
        std::uniform_int_distribution<int> xd(edge_margin, fx.scene.width - w - edge_margin);
        std::uniform_int_distribution<int> yd(edge_margin, fx.scene.height - h - edge_margin);
        const BBox box{xd(rng), 0, 0, 0};
        BBox candidate{box.x0, yd(rng), 0, 0};
        candidate.x1 = candidate.x0 + w;
        candidate.y1 = candidate.y0 + h;
        bool clear = true;
        for (const auto& other : fx.scene.objects) {
          if (!boxes_clear(candidate, other.box, 4)) {
            clear = false;
            break;
          }
        }
        if (!clear) continue;
        SceneObject so;
        so.label = labels[static_cast<std::size_t>(i)];
        so.box = candidate;
        so.color = colors[static_cast<std::size_t>(i)];
        fx.scene.objects.push_back(std::move(so));
        placed = true;
      }
    }
    if (fx.scene.objects.empty()) continue;  // pathological option sets only

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (opt.alias_fraction > 0.0 && unit(rng) < opt.alias_fraction) {
      std::uniform_int_distribution<std::size_t> pick(0, fx.scene.objects.size() - 1);
      fx.scene.objects[pick(rng)].od_label = "thing";
    }

    if (opt.fault != FaultMode::None) {
      fx.scope = opt.fault_scope;
      fx.fault.mode = opt.fault;
      std::uniform_int_distribution<std::size_t> pick(0, fx.scene.objects.size() - 1);
      const std::size_t target = pick(rng);
      // The fault never targets an aliased object: with the alias in play the
      // occlusion stage would see the fault on every occluded caption.
      const std::string& target_label = fx.scene.objects[target].label;
      switch (opt.fault) {
        case FaultMode::Omit:
          fx.fault.label = target_label;
          break;
        case FaultMode::Misclassify: {
          fx.fault.from = target_label;
          for (const auto& l : labels) {
            const bool used = std::any_of(fx.scene.objects.begin(), fx.scene.objects.end(),
                                          [&](const SceneObject& o) { return o.label == l; });
            if (!used) {
              fx.fault.to = l;
              break;
            }
          }
          break;
        }
        case FaultMode::Fabricate: {
          if (fx.scene.objects.size() < 2) {
            fx.fault.mode = FaultMode::None;
            break;
          }
          const std::size_t other = (target + 1) % fx.scene.objects.size();
          fx.fault.trigger = fx.scene.objects[target].label;
          fx.fault.fabricated = fx.scene.objects[other].label;
          break;
        }
        default:
          break;
      }
      if (fx.fault.mode != FaultMode::None) {
        for (auto& o : fx.scene.objects) {
          const bool involved = o.label == fx.fault.label || o.label == fx.fault.from ||
                                o.label == fx.fault.trigger || o.label == fx.fault.fabricated;
          if (involved) o.od_label.reset();
        }
      }
    }
    out.push_back(std::move(fx));
  }
  return out;
}

}  // namespace redcap
