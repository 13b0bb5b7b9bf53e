#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "redcap/adapters.hpp"
#include "redcap/oracle.hpp"
#include "redcap/selection.hpp"
#include "redcap/semantics.hpp"
#include "redcap/toml_lite.hpp"
#include "redcap/transforms.hpp"

namespace redcap {

std::string to_string(SelectionMode m);
SelectionMode selection_mode_from(const std::string& s);

/// Full run configuration. Defaults follow the methodology constants:
/// t_down 0.2, t_up 0.9, cosine 0.55, od score 0.3, k = 3 follow-ups.
struct RunConfig {
  // run
  std::filesystem::path source_dir;
  std::filesystem::path output_dir;
  std::string mode = "simulator";  // "simulator" | "external"
  std::vector<TransformKind> mrs = {TransformKind::Crop, TransformKind::Stretch,
                                    TransformKind::Rotate};
  int followups_per_source = 3;
  std::uint64_t seed = 1;
  int concurrency = 4;
  bool dump_masks = false;
  SelectionMode selection_mode = SelectionMode::Full;

  // thresholds
  FateThresholds fate;
  double cosine_threshold = 0.55;
  double od_score_min = 0.3;

  // matcher resources (optional; missing files mean an exact-match lexicon)
  std::filesystem::path vectors_file;
  std::filesystem::path hypernyms_file;
  std::filesystem::path irregular_plurals_file;

  // external-mode endpoints
  EndpointConfig sut, od, inpaint, pos;

  void validate() const;
  std::string canonical_digest() const;  // config hash recorded in the manifest
};

/// Loads a TOML config; endpoint URLs can be overridden by the environment
/// (REDCAP_SUT_URL, REDCAP_OD_URL, REDCAP_INPAINT_URL, REDCAP_POS_URL).
RunConfig load_run_config(const std::filesystem::path& file);
RunConfig run_config_from_table(const toml::Table& table,
                                const std::filesystem::path& base_dir);

SemanticMatcher build_matcher(const RunConfig& config);
Lemmatizer build_lemmatizer(const RunConfig& config);

struct RunTotals {
  int sources_assessed = 0;
  int sources_skipped = 0;
  int mps = 0;
  int violations = 0;
  int mr_skips = 0;  // per-MR empty-pool skip records
};

struct RunOutcome {
  std::filesystem::path run_dir;
  RunTotals totals;
  std::string manifest_hash;
  int exit_code = 0;  // 0 ok, 2 every source failed on adapters, 3 partial
};

/// Runs the whole pipeline: caption, localize, generate + select follow-ups,
/// caption them, assess, persist. Per-source failures are recorded as skip
/// records and the run continues.
RunOutcome run_pipeline(const RunConfig& config);

// --- metrics -----------------------------------------------------------------

enum class MetricsLevel { Object, Case };

struct MetricsReport {
  MetricsLevel level = MetricsLevel::Object;
  long tp = 0, fn = 0, fp = 0, tn = 0;
  // Undefined ratios (zero denominators) stay unset rather than reading 0.
  std::optional<double> accuracy, precision, recall, f1;
};

/// Confusion counts of reported violations against human labels
/// (JSON Lines: {"mp_id","object","violation"} rows, case rows omit "object").
MetricsReport compute_metrics(const std::filesystem::path& run_dir,
                              const std::filesystem::path& labels_file, MetricsLevel level);
std::string format_metrics(const MetricsReport& report);

// --- report ------------------------------------------------------------------

struct ReportSummary {
  int sources = 0;
  int mps = 0;
  int violations = 0;
  std::map<std::string, int> violations_by_rule;
};

/// Writes summary.json and a static report.html into the run directory.
/// Byte-stable for identical run directories.
ReportSummary emit_report(const std::filesystem::path& run_dir);

// --- selection-mode comparison -------------------------------------------------

struct ModeStats {
  SelectionMode mode = SelectionMode::Full;
  long valid_objects = 0;     // retained + disappeared over selected follow-ups
  long valid_cases = 0;       // follow-ups with at least one valid object
  long violations = 0;
  long distinct_objects = 0;  // semantic groups of violated objects per source
  long distinct_cases = 0;    // sources with at least one violation
};

std::vector<ModeStats> compare_selection_modes(const RunConfig& config,
                                               const std::vector<SelectionMode>& modes);
std::string format_comparison(const std::vector<ModeStats>& stats);

}  // namespace redcap
