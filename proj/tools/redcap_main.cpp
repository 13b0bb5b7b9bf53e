// redcap: metamorphic testing of image-captioning systems via image-level
// reduction transformations.
//
// Subcommands:
//   run      execute the full pipeline over a source corpus
//   metrics  confusion-matrix metrics of a run against human labels
//   report   render report.html + summary.json for a finished run
//   compare  rerun selection in several modes and tabulate case quality
//   localize single-image localization debug dump
//
// Exit codes: 0 success, 1 usage/config error, 2 adapter failure,
//             3 partial run with skips.

#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "redcap/alignment.hpp"
#include "redcap/errors.hpp"
#include "redcap/harness.hpp"
#include "redcap/simulator.hpp"

namespace {

using namespace redcap;

struct CommonOverrides {
  std::string config_file;
  std::string source_dir, output_dir, mode, selection_mode;
  std::vector<std::string> mrs;
  int followups = -1;
  int concurrency = -1;
  std::int64_t seed = -1;
  double t_down = -1, t_up = -1, cosine = -1, od_score = -1;
  bool dump_masks = false;
};

void add_common(CLI::App* cmd, CommonOverrides& o, bool config_required) {
  auto* opt = cmd->add_option("-c,--config", o.config_file, "TOML run configuration");
  if (config_required) opt->required();
  cmd->add_option("--source-dir", o.source_dir, "override run.source_dir");
  cmd->add_option("--output-dir", o.output_dir, "override run.output_dir");
  cmd->add_option("--mode", o.mode, "simulator|external");
  cmd->add_option("--selection-mode", o.selection_mode, "full|no_ambiguity|no_diversity|random");
  cmd->add_option("--mrs", o.mrs, "enabled MRs, e.g. --mrs MR1 MR3");
  cmd->add_option("--followups", o.followups, "follow-ups per source image");
  cmd->add_option("--concurrency", o.concurrency, "parallel source bound");
  cmd->add_option("--seed", o.seed, "run seed");
  cmd->add_option("--t-down", o.t_down, "disappear threshold");
  cmd->add_option("--t-up", o.t_up, "retain threshold");
  cmd->add_option("--cosine", o.cosine, "semantic cosine threshold");
  cmd->add_option("--od-score", o.od_score, "detector score cutoff");
  cmd->add_flag("--dump-masks", o.dump_masks, "write localization masks as PBM");
}

RunConfig make_config(const CommonOverrides& o) {
  RunConfig c = load_run_config(o.config_file);
  if (!o.source_dir.empty()) c.source_dir = o.source_dir;
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  if (!o.mode.empty()) c.mode = o.mode;
  if (!o.selection_mode.empty()) c.selection_mode = selection_mode_from(o.selection_mode);
  if (!o.mrs.empty()) {
    c.mrs.clear();
    for (const auto& name : o.mrs) {
      if (name == "MR1") c.mrs.push_back(TransformKind::Crop);
      else if (name == "MR2") c.mrs.push_back(TransformKind::Stretch);
      else if (name == "MR3") c.mrs.push_back(TransformKind::Rotate);
      else throw ConfigError("unknown MR '" + name + "'");
    }
  }
  if (o.followups > 0) c.followups_per_source = o.followups;
  if (o.concurrency > 0) c.concurrency = o.concurrency;
  if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
  if (o.t_down >= 0) c.fate.t_down = o.t_down;
  if (o.t_up >= 0) c.fate.t_up = o.t_up;
  if (o.cosine >= 0) c.cosine_threshold = o.cosine;
  if (o.od_score >= 0) c.od_score_min = o.od_score;
  if (o.dump_masks) c.dump_masks = true;
  c.validate();
  return c;
}

int cmd_run(const CommonOverrides& o) {
  const RunConfig config = make_config(o);
  const RunOutcome outcome = run_pipeline(config);
  std::cout << "run directory: " << outcome.run_dir.string() << "\n"
            << "sources assessed: " << outcome.totals.sources_assessed
            << ", skipped: " << outcome.totals.sources_skipped << "\n"
            << "MPs: " << outcome.totals.mps
            << ", violations: " << outcome.totals.violations << "\n"
            << "manifest hash: " << outcome.manifest_hash << "\n";
  return outcome.exit_code;
}

int cmd_metrics(const std::string& run_dir, const std::string& labels,
                const std::string& level) {
  MetricsLevel lvl;
  if (level == "object") lvl = MetricsLevel::Object;
  else if (level == "case") lvl = MetricsLevel::Case;
  else throw ConfigError("--level must be object or case");
  std::cout << format_metrics(compute_metrics(run_dir, labels, lvl));
  return 0;
}

int cmd_report(const std::string& run_dir) {
  const ReportSummary s = emit_report(run_dir);
  std::cout << "report.html and summary.json written to " << run_dir << "\n"
            << "MPs: " << s.mps << ", violations: " << s.violations << "\n";
  return 0;
}

int cmd_compare(const CommonOverrides& o, const std::vector<std::string>& mode_names) {
  const RunConfig config = make_config(o);
  std::vector<SelectionMode> modes;
  for (const auto& name : mode_names) modes.push_back(selection_mode_from(name));
  if (modes.empty()) {
    modes = {SelectionMode::Full, SelectionMode::NoAmbiguity, SelectionMode::NoDiversity,
             SelectionMode::Random};
  }
  std::cout << format_comparison(compare_selection_modes(config, modes));
  return 0;
}

int cmd_localize(const CommonOverrides& o, const std::string& image_file,
                 const std::string& scene_file, const std::string& mask_dir) {
  const RunConfig config = make_config(o);
  const SemanticMatcher matcher = build_matcher(config);
  const Lemmatizer lemmatizer = build_lemmatizer(config);

  Raster image;
  std::shared_ptr<CaptionService> sut;
  std::shared_ptr<DetectionService> od;
  if (!scene_file.empty()) {
    SceneFixture fx = load_scene(scene_file);
    image = render_scene(fx.scene);
    sut = std::make_shared<CachingCaptionService>(
        std::make_shared<SimulatorSut>(fx.scene, fx.fault, fx.scope));
    od = std::make_shared<SimulatorOd>(fx.scene);
  } else if (!image_file.empty()) {
    image = load_png(image_file);
    sut = std::make_shared<CachingCaptionService>(
        std::shared_ptr<CaptionService>(make_caption_client(config.sut)));
    od = std::shared_ptr<DetectionService>(make_detection_client(config.od));
  } else {
    throw ConfigError("localize needs --image or --scene");
  }
  auto inpaint = std::shared_ptr<InpaintService>(make_inpaint_client(config.inpaint));
  auto tagger = std::shared_ptr<TagService>(make_tag_client(config.pos, lemmatizer));

  const std::string text = sut->caption(image);
  Caption caption{text, tagger->tag(text)};
  AlignmentServices services{*sut, *inpaint, *tagger};
  const LocalizationMap map =
      build_localization_map(caption, image, *od, services, matcher, config.od_score_min);

  nlohmann::json out;
  out["caption"] = text;
  out["entries"] = nlohmann::json::array();
  for (const auto& e : map.entries) {
    nlohmann::json je;
    je["object"] = e.object.lemma;
    je["surface"] = e.object.surface;
    je["via"] = e.source == LocSource::Detector ? "detector" : "occlusion";
    je["mask_pixels"] = mask_count(e.mask);
    nlohmann::json regions = nlohmann::json::array();
    for (const BBox& r : e.regions) regions.push_back({r.x0, r.y0, r.x1, r.y1});
    je["regions"] = std::move(regions);
    out["entries"].push_back(std::move(je));
    if (!mask_dir.empty()) {
      std::filesystem::create_directories(mask_dir);
      save_pbm(e.mask, std::filesystem::path(mask_dir) / (e.object.lemma + ".pbm"));
    }
  }
  out["unlocated"] = nlohmann::json::array();
  for (const auto& u : map.unlocated) out["unlocated"].push_back(u.lemma);
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metamorphic testing of image-captioning systems via image-level reduction"};
  app.require_subcommand(1);

  CommonOverrides run_o, compare_o, localize_o;
  std::string run_dir, labels_file, level = "object";
  std::vector<std::string> compare_modes;
  std::string localize_image, localize_scene, localize_mask_dir;

  auto* run_cmd = app.add_subcommand("run", "execute the testing pipeline");
  add_common(run_cmd, run_o, true);

  auto* metrics_cmd = app.add_subcommand("metrics", "score a run against labels");
  metrics_cmd->add_option("--run", run_dir, "run directory")->required();
  metrics_cmd->add_option("--labels", labels_file, "labels JSONL file")->required();
  metrics_cmd->add_option("--level", level, "object|case");

  auto* report_cmd = app.add_subcommand("report", "emit report.html for a run");
  std::string report_dir;
  report_cmd->add_option("--run", report_dir, "run directory")->required();

  auto* compare_cmd = app.add_subcommand("compare", "compare selection modes");
  add_common(compare_cmd, compare_o, true);
  compare_cmd->add_option("--modes", compare_modes, "subset of full no_ambiguity no_diversity random");

  auto* localize_cmd = app.add_subcommand("localize", "debug localization for one image");
  add_common(localize_cmd, localize_o, true);
  localize_cmd->add_option("--image", localize_image, "PNG input (external mode)");
  localize_cmd->add_option("--scene", localize_scene, "scene JSON input (simulator)");
  localize_cmd->add_option("--dump-dir", localize_mask_dir, "write per-object PBM masks here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_o);
    if (metrics_cmd->parsed()) return cmd_metrics(run_dir, labels_file, level);
    if (report_cmd->parsed()) return cmd_report(report_dir);
    if (compare_cmd->parsed()) return cmd_compare(compare_o, compare_modes);
    if (localize_cmd->parsed()) {
      return cmd_localize(localize_o, localize_image, localize_scene, localize_mask_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InputDomainError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const AdapterError& e) {
    std::cerr << "adapter error: " << e.what() << "\n";
    if (!e.payload().empty()) std::cerr << "payload: " << e.payload() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
