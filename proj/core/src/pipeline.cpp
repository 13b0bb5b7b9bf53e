#include <algorithm>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "json.hpp"
#include "redcap/alignment.hpp"
#include "redcap/errors.hpp"
#include "redcap/harness.hpp"
#include "redcap/simulator.hpp"

namespace redcap {

namespace {

using nlohmann::json;

std::string mr_name(TransformKind k) {
  switch (k) {
    case TransformKind::Crop: return "MR1";
    case TransformKind::Stretch: return "MR2";
    case TransformKind::Rotate: return "MR3";
  }
  return "?";
}

json spec_to_json(const TransformSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  switch (spec.kind) {
    case TransformKind::Crop: {
      const BBox& b = std::get<CropParams>(spec.params).box;
      j["box"] = {b.x0, b.y0, b.x1, b.y1};
      break;
    }
    case TransformKind::Stretch: {
      const auto& p = std::get<StretchParams>(spec.params);
      j["axis"] = to_string(p.axis);
      j["factor"] = p.factor;
      j["anchor"] = p.anchor;
      break;
    }
    case TransformKind::Rotate:
      j["angle"] = std::get<RotateParams>(spec.params).angle_deg;
      break;
  }
  return j;
}

std::string sanitize(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    if (c == ':' || c == '/' || c == '\\') c = '_';
  }
  return out;
}

struct SourceUnit {
  std::string id;
  Raster image;
  std::shared_ptr<CaptionService> sut;
  std::shared_ptr<DetectionService> od;
  std::shared_ptr<InpaintService> inpaint;
  std::shared_ptr<TagService> tagger;
};

struct SourceResult {
  std::string id;
  bool failed = false;
  bool adapter_failure = false;
  std::string error;
  int mr_skips = 0;
  std::vector<std::string> mp_lines;
  std::vector<std::string> violation_lines;
  std::vector<std::pair<std::string, Raster>> images;  // run-dir relative path
  std::vector<std::pair<std::string, BitMask>> masks;
  std::vector<json> mask_index_entries;
};

struct SharedClients {
  std::shared_ptr<CaptionService> sut;
  std::shared_ptr<DetectionService> od;
  std::shared_ptr<InpaintService> inpaint;
  std::shared_ptr<TagService> tagger;
};

SourceResult process_source(const RunConfig& config, const SourceUnit& unit,
                            const SemanticMatcher& matcher,
                            const std::set<std::string>& existing_ids) {
  SourceResult res;
  res.id = unit.id;

  const std::string source_text = unit.sut->caption(unit.image);
  Caption source_caption{source_text, unit.tagger->tag(source_text)};

  std::vector<Detection> detections;
  for (Detection& d : unit.od->detect(unit.image)) {
    if (d.score >= config.od_score_min) detections.push_back(std::move(d));
  }
  double mean_area = default_mean_object_area(unit.image.width(), unit.image.height());
  if (!detections.empty()) {
    double sum = 0.0;
    for (const auto& d : detections) sum += static_cast<double>(d.box.area());
    mean_area = sum / static_cast<double>(detections.size());
  }

  AlignmentServices services{*unit.sut, *unit.inpaint, *unit.tagger};
  const std::vector<NounPhrase> objects = extract_objects(source_caption);
  LocalizationMap loc =
      align_by_detection(objects, detections, matcher, unit.image.width(), unit.image.height());
  if (!loc.unlocated.empty() && !detections.empty()) {
    std::vector<BBox> boxes;
    for (const auto& d : detections) boxes.push_back(d.box);
    std::vector<NounPhrase> still;
    for (const NounPhrase& o : loc.unlocated) {
      auto located = occlusion_localize(o, unit.image, boxes, services, matcher);
      if (located) {
        loc.entries.push_back(LocatedObject{o, std::move(located->first),
                                            LocSource::Occlusion, std::move(located->second)});
      } else {
        still.push_back(o);
      }
    }
    loc.unlocated = std::move(still);
  }

  if (config.dump_masks) {
    int i = 0;
    for (const LocatedObject& lo : loc.entries) {
      const std::string file =
          "masks/" + sanitize(unit.id) + "_" + std::to_string(i) + "_" +
          sanitize(lo.object.lemma) + ".pbm";
      res.masks.emplace_back(file, lo.mask);
      json e;
      e["source"] = unit.id;
      e["object"] = lo.object.lemma;
      e["file"] = file;
      e["via"] = lo.source == LocSource::Detector ? "detector" : "occlusion";
      json regions = json::array();
      for (const BBox& r : lo.regions) regions.push_back({r.x0, r.y0, r.x1, r.y1});
      e["regions"] = std::move(regions);
      res.mask_index_entries.push_back(std::move(e));
      ++i;
    }
  }

  json unlocated = json::array();
  for (const NounPhrase& o : loc.unlocated) unlocated.push_back(o.lemma);

  for (TransformKind kind : config.mrs) {
    const std::string mr = mr_name(kind);
    std::vector<TransformResult> pool =
        generate_candidates(unit.image, mean_area, kind, config.seed);
    if (pool.empty()) {
      json skip;
      skip["skip"] = true;
      skip["source"] = unit.id;
      skip["mr"] = mr;
      skip["reason"] = "empty candidate pool";
      res.mp_lines.push_back(skip.dump());
      ++res.mr_skips;
      continue;
    }
    const std::vector<CandidateAssessment> assessments =
        assess_candidates(loc, pool, config.fate);
    const std::uint64_t sel_seed = fnv1a64(unit.id + ":" + mr, config.seed);
    const std::vector<std::size_t> picks =
        select_followups_mode(assessments, pool, static_cast<std::size_t>(config.followups_per_source),
                              config.selection_mode, sel_seed);

    for (std::size_t ordinal = 0; ordinal < picks.size(); ++ordinal) {
      const std::size_t p = picks[ordinal];
      const std::string mp_id = unit.id + ":" + mr + ":" + std::to_string(ordinal);
      if (existing_ids.contains(mp_id)) continue;  // resumed run

      const std::string followup_text = unit.sut->caption(pool[p].image);
      Caption followup_caption{followup_text, unit.tagger->tag(followup_text)};
      MpAssessment assessment =
          assess_mp(mp_id, pool[p].spec, source_caption, followup_caption, loc,
                    pool[p].m_tran, config.fate, matcher);

      const std::string image_file = "images/" + sanitize(mp_id) + ".png";
      res.images.emplace_back(image_file, pool[p].image);

      json rec;
      rec["mp_id"] = mp_id;
      rec["source"] = unit.id;
      rec["mr"] = mr;
      rec["spec"] = spec_to_json(pool[p].spec);
      rec["source_caption"] = source_text;
      rec["followup_caption"] = followup_text;
      json fates = json::array();
      int n_retain = 0, n_ambiguous = 0, n_disappear = 0;
      for (const ObjectFate& f : assessment.mp.fates) {
        fates.push_back({{"object", f.object.lemma},
                         {"ratio", f.ratio},
                         {"fate", to_string(f.fate)}});
        switch (f.fate) {
          case Fate::Retain: ++n_retain; break;
          case Fate::Ambiguous: ++n_ambiguous; break;
          case Fate::Disappear: ++n_disappear; break;
        }
      }
      rec["fates"] = std::move(fates);
      rec["unlocated"] = unlocated;
      rec["n_retain"] = n_retain;
      rec["n_ambiguous"] = n_ambiguous;
      rec["n_disappear"] = n_disappear;
      rec["followup_image"] = image_file;
      rec["violations"] = assessment.violations.size();
      res.mp_lines.push_back(rec.dump());

      for (const Violation& v : assessment.violations) {
        json vj;
        vj["mp_id"] = v.mp_id;
        vj["rule"] = to_string(v.rule);
        vj["object"] = v.object;
        vj["side"] = to_string(v.side);
        vj["hint"] = to_string(v.hint);
        res.violation_lines.push_back(vj.dump());
      }
    }
  }
  return res;
}

std::vector<std::filesystem::path> list_sources(const RunConfig& config) {
  const std::string ext = config.mode == "simulator" ? ".json" : ".png";
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(config.source_dir)) {
    throw ConfigError("source directory does not exist: " + config.source_dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(config.source_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw ConfigError("no " + ext + " sources in " + config.source_dir.string());
  }
  return files;
}

SourceUnit make_unit(const RunConfig& config, const std::filesystem::path& file,
                     const SharedClients& shared, const Lemmatizer& lemmatizer) {
  SourceUnit unit;
  unit.id = file.stem().string();
  if (config.mode == "simulator") {
    SceneFixture fx = load_scene(file);
    unit.image = render_scene(fx.scene);
    unit.sut = std::make_shared<CachingCaptionService>(
        std::make_shared<SimulatorSut>(fx.scene, fx.fault, fx.scope));
    unit.od = std::make_shared<SimulatorOd>(fx.scene);
    unit.inpaint.reset(make_inpaint_client(EndpointConfig{}).release());
    unit.tagger.reset(make_tag_client(EndpointConfig{}, lemmatizer).release());
  } else {
    unit.image = load_png(file);
    unit.sut = shared.sut;
    unit.od = shared.od;
    unit.inpaint = shared.inpaint;
    unit.tagger = shared.tagger;
  }
  return unit;
}

}  // namespace

RunOutcome run_pipeline(const RunConfig& config) {
  config.validate();
  const std::vector<std::filesystem::path> sources = list_sources(config);

  const SemanticMatcher matcher = build_matcher(config);
  const Lemmatizer lemmatizer = build_lemmatizer(config);

  SharedClients shared;
  if (config.mode == "external") {
    shared.sut = std::make_shared<CachingCaptionService>(
        std::shared_ptr<CaptionService>(make_caption_client(config.sut)));
    shared.od = std::shared_ptr<DetectionService>(make_detection_client(config.od));
    shared.inpaint = std::shared_ptr<InpaintService>(make_inpaint_client(config.inpaint));
    shared.tagger = std::shared_ptr<TagService>(make_tag_client(config.pos, lemmatizer));
  }

  const std::filesystem::path run_dir = config.output_dir;
  std::filesystem::create_directories(run_dir / "images");
  if (config.dump_masks) std::filesystem::create_directories(run_dir / "masks");

  // Completed mp_ids from an interrupted run are skipped, not recomputed.
  std::set<std::string> existing_ids;
  {
    std::ifstream is(run_dir / "mps.jsonl");
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (!j.is_discarded() && j.contains("mp_id")) {
        existing_ids.insert(j["mp_id"].get<std::string>());
      }
    }
  }

  std::ofstream mps_out(run_dir / "mps.jsonl", std::ios::app);
  std::ofstream violations_out(run_dir / "violations.jsonl", std::ios::app);
  if (!mps_out || !violations_out) {
    throw ConfigError("cannot open run files under " + run_dir.string());
  }

  auto worker = [&](std::size_t i) -> SourceResult {
    const std::filesystem::path& file = sources[i];
    try {
      const SourceUnit unit = make_unit(config, file, shared, lemmatizer);
      return process_source(config, unit, matcher, existing_ids);
    } catch (const AdapterError& e) {
      SourceResult r;
      r.id = file.stem().string();
      r.failed = true;
      r.adapter_failure = true;
      r.error = e.what();
      return r;
    } catch (const std::exception& e) {
      SourceResult r;
      r.id = file.stem().string();
      r.failed = true;
      r.error = e.what();
      return r;
    }
  };

  // Bounded parallel compute; persistence drains strictly in source order so
  // identical runs produce identical files.
  const std::size_t n = sources.size();
  const std::size_t window =
      std::min<std::size_t>(static_cast<std::size_t>(config.concurrency), n);
  std::vector<std::future<SourceResult>> futures(n);
  std::size_t next = 0;
  for (; next < window; ++next) futures[next] = std::async(std::launch::async, worker, next);

  json manifest_sources = json::array();
  RunTotals totals;
  int adapter_failures = 0;
  json mask_index = json::array();

  for (std::size_t i = 0; i < n; ++i) {
    SourceResult r = futures[i].get();
    if (next < n) {
      futures[next] = std::async(std::launch::async, worker, next);
      ++next;
    }

    json s;
    s["id"] = r.id;
    if (r.failed) {
      ++totals.sources_skipped;
      if (r.adapter_failure) ++adapter_failures;
      s["status"] = "skipped";
      s["error"] = r.error;
      json skip;
      skip["skip"] = true;
      skip["source"] = r.id;
      skip["reason"] = r.error;
      mps_out << skip.dump() << "\n";
    } else {
      ++totals.sources_assessed;
      totals.mr_skips += r.mr_skips;
      s["status"] = "assessed";
      for (const auto& [file, img] : r.images) save_png(img, run_dir / file);
      for (const auto& [file, mask] : r.masks) save_pbm(mask, run_dir / file);
      for (json& e : r.mask_index_entries) mask_index.push_back(std::move(e));
      for (const std::string& line : r.mp_lines) mps_out << line << "\n";
      for (const std::string& line : r.violation_lines) violations_out << line << "\n";
    }
    manifest_sources.push_back(std::move(s));
  }
  mps_out.flush();
  violations_out.flush();

  if (config.dump_masks) {
    std::ofstream idx(run_dir / "masks" / "index.json");
    idx << mask_index.dump(2) << "\n";
  }

  // Totals and the content hash come from the files themselves so resumed
  // runs stay consistent.
  std::uint64_t content_hash = fnv1a64(std::string_view{});
  {
    std::ifstream is(run_dir / "mps.jsonl");
    std::string line;
    while (std::getline(is, line)) {
      content_hash = fnv1a64(line, content_hash);
      json j = json::parse(line, nullptr, false);
      if (!j.is_discarded() && j.contains("mp_id")) ++totals.mps;
    }
  }
  {
    std::ifstream is(run_dir / "violations.jsonl");
    std::string line;
    while (std::getline(is, line)) {
      content_hash = fnv1a64(line, content_hash);
      ++totals.violations;
    }
  }

  json manifest;
  manifest["config_hash"] = config.canonical_digest();
  manifest["mode"] = config.mode;
  std::vector<std::string> mr_names;
  for (auto k : config.mrs) mr_names.push_back(mr_name(k));
  manifest["mrs"] = mr_names;
  manifest["k"] = config.followups_per_source;
  manifest["seed"] = config.seed;
  manifest["selection_mode"] = to_string(config.selection_mode);
  manifest["thresholds"] = {{"t_down", config.fate.t_down},
                            {"t_up", config.fate.t_up},
                            {"cosine", config.cosine_threshold},
                            {"od_score", config.od_score_min}};
  manifest["sources"] = std::move(manifest_sources);
  manifest["totals"] = {{"sources_assessed", totals.sources_assessed},
                        {"sources_skipped", totals.sources_skipped},
                        {"mps", totals.mps},
                        {"violations", totals.violations},
                        {"mr_skips", totals.mr_skips}};
  manifest["content_hash"] = hex64(content_hash);
  const std::string manifest_text = manifest.dump(2) + "\n";
  {
    std::ofstream os(run_dir / "manifest.json");
    os << manifest_text;
  }

  RunOutcome out;
  out.run_dir = run_dir;
  out.totals = totals;
  out.manifest_hash = hex64(fnv1a64(manifest_text));
  if (totals.sources_assessed == 0 && adapter_failures > 0) {
    out.exit_code = 2;
  } else if (totals.sources_skipped > 0 || totals.mr_skips > 0) {
    out.exit_code = 3;
  }
  return out;
}

}  // namespace redcap
