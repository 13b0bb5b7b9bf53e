#include <cstdlib>

#include "json.hpp"
#include "redcap/errors.hpp"
#include "redcap/harness.hpp"

namespace redcap {

std::string to_string(SelectionMode m) {
  switch (m) {
    case SelectionMode::Full: return "full";
    case SelectionMode::NoAmbiguity: return "no_ambiguity";
    case SelectionMode::NoDiversity: return "no_diversity";
    case SelectionMode::Random: return "random";
  }
  return "full";
}

SelectionMode selection_mode_from(const std::string& s) {
  if (s == "full") return SelectionMode::Full;
  if (s == "no_ambiguity") return SelectionMode::NoAmbiguity;
  if (s == "no_diversity") return SelectionMode::NoDiversity;
  if (s == "random") return SelectionMode::Random;
  throw ConfigError("unknown selection mode '" + s + "'");
}

void RunConfig::validate() const {
  fate.validate();
  if (followups_per_source < 1) throw ConfigError("followups_per_source must be >= 1");
  if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
  if (!(cosine_threshold > 0.0)) throw ConfigError("cosine threshold must be positive");
  if (od_score_min < 0.0 || od_score_min > 1.0) {
    throw ConfigError("od_score must be within [0,1]");
  }
  if (mrs.empty()) throw ConfigError("at least one MR must be enabled");
  if (mode != "simulator" && mode != "external") {
    throw ConfigError("mode must be 'simulator' or 'external'");
  }
  if (source_dir.empty()) throw ConfigError("source_dir is required");
  if (output_dir.empty()) throw ConfigError("output_dir is required");
}

std::string RunConfig::canonical_digest() const {
  nlohmann::json j;
  j["source_dir"] = source_dir.string();
  j["mode"] = mode;
  std::vector<std::string> mr_names;
  for (auto k : mrs) mr_names.push_back(to_string(k));
  j["mrs"] = mr_names;
  j["k"] = followups_per_source;
  j["seed"] = seed;
  j["selection_mode"] = to_string(selection_mode);
  j["t_down"] = fate.t_down;
  j["t_up"] = fate.t_up;
  j["cosine"] = cosine_threshold;
  j["od_score"] = od_score_min;
  j["vectors"] = vectors_file.string();
  j["hypernyms"] = hypernyms_file.string();
  j["irregular_plurals"] = irregular_plurals_file.string();
  return hex64(fnv1a64(j.dump()));
}

namespace {

EndpointConfig endpoint_from(const toml::Table& t, const std::string& section,
                             const char* env_url) {
  EndpointConfig ep;
  const std::string transport = toml::get_string(t, section + ".transport", "builtin");
  if (transport == "builtin") {
    ep.transport = EndpointConfig::Transport::Builtin;
  } else if (transport == "process") {
    ep.transport = EndpointConfig::Transport::Process;
  } else if (transport == "http") {
    ep.transport = EndpointConfig::Transport::Http;
  } else {
    throw ConfigError(section + ".transport must be builtin|process|http");
  }
  ep.command = toml::get_string(t, section + ".command", "");
  ep.url = toml::get_string(t, section + ".url", "");
  ep.timeout_ms = static_cast<int>(toml::get_int(t, section + ".timeout_ms", 10000));
  ep.retries = static_cast<int>(toml::get_int(t, section + ".retries", 2));
  ep.max_in_flight = static_cast<int>(toml::get_int(t, section + ".max_in_flight", 4));
  if (const char* url = std::getenv(env_url); url && *url) {
    ep.url = url;
    ep.transport = EndpointConfig::Transport::Http;
  }
  return ep;
}

TransformKind mr_from(const std::string& name) {
  if (name == "MR1" || name == "crop") return TransformKind::Crop;
  if (name == "MR2" || name == "stretch") return TransformKind::Stretch;
  if (name == "MR3" || name == "rotate") return TransformKind::Rotate;
  throw ConfigError("unknown MR '" + name + "' (expected MR1|MR2|MR3)");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

RunConfig run_config_from_table(const toml::Table& t, const std::filesystem::path& base) {
  RunConfig c;
  c.source_dir = resolve(base, toml::get_string(t, "run.source_dir", ""));
  c.output_dir = resolve(base, toml::get_string(t, "run.output_dir", ""));
  c.mode = toml::get_string(t, "run.mode", "simulator");
  c.followups_per_source = static_cast<int>(toml::get_int(t, "run.followups_per_source", 3));
  c.seed = static_cast<std::uint64_t>(toml::get_int(t, "run.seed", 1));
  c.concurrency = static_cast<int>(toml::get_int(t, "run.concurrency", 4));
  c.dump_masks = toml::get_bool(t, "run.dump_masks", false);
  c.selection_mode =
      selection_mode_from(toml::get_string(t, "run.selection_mode", "full"));
  c.mrs.clear();
  for (const std::string& name :
       toml::get_string_array(t, "run.mrs", {"MR1", "MR2", "MR3"})) {
    c.mrs.push_back(mr_from(name));
  }

  c.fate.t_down = toml::get_number(t, "thresholds.t_down", 0.2);
  c.fate.t_up = toml::get_number(t, "thresholds.t_up", 0.9);
  c.cosine_threshold = toml::get_number(t, "thresholds.cosine", 0.55);
  c.od_score_min = toml::get_number(t, "thresholds.od_score", 0.3);

  c.vectors_file = resolve(base, toml::get_string(t, "matcher.vectors", ""));
  c.hypernyms_file = resolve(base, toml::get_string(t, "matcher.hypernyms", ""));
  c.irregular_plurals_file =
      resolve(base, toml::get_string(t, "matcher.irregular_plurals", ""));

  c.sut = endpoint_from(t, "adapters.sut", "REDCAP_SUT_URL");
  c.od = endpoint_from(t, "adapters.od", "REDCAP_OD_URL");
  c.inpaint = endpoint_from(t, "adapters.inpaint", "REDCAP_INPAINT_URL");
  c.pos = endpoint_from(t, "adapters.pos", "REDCAP_POS_URL");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  const toml::Table t = toml::parse_file(file);
  RunConfig c = run_config_from_table(t, file.parent_path());
  c.validate();
  return c;
}

SemanticMatcher build_matcher(const RunConfig& config) {
  SemanticMatcher m;
  m.set_cosine_threshold(config.cosine_threshold);
  if (!config.vectors_file.empty()) m.load_vectors(config.vectors_file);
  if (!config.hypernyms_file.empty()) m.load_hypernyms(config.hypernyms_file);
  return m;
}

Lemmatizer build_lemmatizer(const RunConfig& config) {
  if (config.irregular_plurals_file.empty()) return Lemmatizer{};
  return Lemmatizer::from_file(config.irregular_plurals_file);
}

}  // namespace redcap
