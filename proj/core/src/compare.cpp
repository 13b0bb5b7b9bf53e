#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "redcap/errors.hpp"
#include "redcap/harness.hpp"

namespace redcap {

namespace {

using nlohmann::json;

/// Count semantic equivalence groups among the violated object lemmas of one
/// source image (union-find over pairwise same_category).
long distinct_groups(const std::vector<std::string>& lemmas, const SemanticMatcher& m) {
  const std::size_t n = lemmas.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (m.same_category(lemmas[i], lemmas[j])) parent[find(i)] = find(j);
    }
  }
  long groups = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (find(i) == i) ++groups;
  }
  return groups;
}

}  // namespace

std::vector<ModeStats> compare_selection_modes(const RunConfig& base,
                                               const std::vector<SelectionMode>& modes) {
  const SemanticMatcher matcher = build_matcher(base);
  std::vector<ModeStats> out;

  for (SelectionMode mode : modes) {
    RunConfig config = base;
    config.selection_mode = mode;
    config.output_dir = base.output_dir / ("compare_" + to_string(mode));
    std::filesystem::remove_all(config.output_dir);
    run_pipeline(config);

    ModeStats stats;
    stats.mode = mode;

    std::map<std::string, std::vector<std::string>> violated_by_source;
    {
      std::ifstream is(config.output_dir / "mps.jsonl");
      std::string line;
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("mp_id")) continue;
        const long valid = j.value("n_retain", 0) + j.value("n_disappear", 0);
        stats.valid_objects += valid;
        if (valid > 0) ++stats.valid_cases;
      }
    }
    {
      std::ifstream is(config.output_dir / "violations.jsonl");
      std::string line;
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        ++stats.violations;
        const std::string mp = j.value("mp_id", "");
        const std::string source = mp.substr(0, mp.find(':'));
        violated_by_source[source].push_back(j.value("object", ""));
      }
    }
    stats.distinct_cases = static_cast<long>(violated_by_source.size());
    for (const auto& [source, lemmas] : violated_by_source) {
      stats.distinct_objects += distinct_groups(lemmas, matcher);
    }
    out.push_back(stats);
  }
  return out;
}

std::string format_comparison(const std::vector<ModeStats>& stats) {
  std::ostringstream os;
  os << "mode           valid_objects  valid_cases  violations  distinct_objects  distinct_cases\n";
  for (const ModeStats& s : stats) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %13ld %12ld %11ld %17ld %15ld\n",
                  to_string(s.mode).c_str(), s.valid_objects, s.valid_cases, s.violations,
                  s.distinct_objects, s.distinct_cases);
    os << line;
  }
  return os.str();
}

}  // namespace redcap
