#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "redcap/errors.hpp"
#include "redcap/harness.hpp"

namespace redcap {

namespace {

using nlohmann::json;

struct RunRecords {
  std::set<std::string> mp_ids;
  std::set<std::pair<std::string, std::string>> reported_objects;  // (mp, lemma)
  std::set<std::string> reported_cases;
};

RunRecords read_run(const std::filesystem::path& run_dir) {
  RunRecords rr;
  std::ifstream mps(run_dir / "mps.jsonl");
  if (!mps) throw ConfigError("no mps.jsonl under " + run_dir.string());
  std::string line;
  while (std::getline(mps, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("mp_id")) continue;
    rr.mp_ids.insert(j["mp_id"].get<std::string>());
  }
  std::ifstream vs(run_dir / "violations.jsonl");
  while (std::getline(vs, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    const std::string mp = j.value("mp_id", "");
    rr.reported_objects.emplace(mp, j.value("object", ""));
    rr.reported_cases.insert(mp);
  }
  return rr;
}

}  // namespace

MetricsReport compute_metrics(const std::filesystem::path& run_dir,
                              const std::filesystem::path& labels_file,
                              MetricsLevel level) {
  const RunRecords rr = read_run(run_dir);

  std::ifstream is(labels_file);
  if (!is) throw ConfigError("cannot open labels file " + labels_file.string());

  // Object rows: {"mp_id","object","violation"}; case rows omit "object".
  std::map<std::pair<std::string, std::string>, bool> object_truth;
  std::map<std::string, bool> case_truth_explicit;
  std::map<std::string, bool> case_truth_derived;
  std::set<std::string> unknown;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("mp_id") || !j.contains("violation")) {
      throw ConfigError(labels_file.string() + ":" + std::to_string(lineno) +
                        ": expected {\"mp_id\",[\"object\"],\"violation\"}");
    }
    const std::string mp = j["mp_id"].get<std::string>();
    if (!rr.mp_ids.contains(mp)) unknown.insert(mp);
    const bool truth = j["violation"].get<bool>();
    if (j.contains("object")) {
      object_truth[{mp, j["object"].get<std::string>()}] = truth;
      case_truth_derived[mp] = case_truth_derived[mp] || truth;
    } else {
      case_truth_explicit[mp] = truth;
      if (!case_truth_derived.contains(mp)) case_truth_derived[mp] = false;
    }
  }
  if (!unknown.empty()) {
    std::ostringstream os;
    os << "labels reference mp_ids not present in the run:";
    for (const auto& id : unknown) os << " " << id;
    throw ConfigError(os.str());
  }

  MetricsReport rep;
  rep.level = level;
  if (level == MetricsLevel::Object) {
    for (const auto& [unit, truth] : object_truth) {
      const bool reported = rr.reported_objects.contains(unit);
      if (truth && reported) ++rep.tp;
      else if (truth && !reported) ++rep.fn;
      else if (!truth && reported) ++rep.fp;
      else ++rep.tn;
    }
  } else {
    for (const auto& [mp, derived] : case_truth_derived) {
      const auto it = case_truth_explicit.find(mp);
      const bool truth = it != case_truth_explicit.end() ? it->second || derived : derived;
      const bool reported = rr.reported_cases.contains(mp);
      if (truth && reported) ++rep.tp;
      else if (truth && !reported) ++rep.fn;
      else if (!truth && reported) ++rep.fp;
      else ++rep.tn;
    }
  }

  const long total = rep.tp + rep.fn + rep.fp + rep.tn;
  if (total > 0) rep.accuracy = static_cast<double>(rep.tp + rep.tn) / total;
  if (rep.tp + rep.fp > 0) rep.precision = static_cast<double>(rep.tp) / (rep.tp + rep.fp);
  if (rep.tp + rep.fn > 0) rep.recall = static_cast<double>(rep.tp) / (rep.tp + rep.fn);
  if (rep.precision && rep.recall && (*rep.precision + *rep.recall) > 0.0) {
    rep.f1 = 2.0 * *rep.precision * *rep.recall / (*rep.precision + *rep.recall);
  }
  return rep;
}

std::string format_metrics(const MetricsReport& r) {
  auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("undefined");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "level=" << (r.level == MetricsLevel::Object ? "object" : "case") << "\n"
     << "tp=" << r.tp << " fn=" << r.fn << " fp=" << r.fp << " tn=" << r.tn << "\n"
     << "accuracy=" << pct(r.accuracy) << " precision=" << pct(r.precision)
     << " recall=" << pct(r.recall) << " f1=" << pct(r.f1) << "\n";
  return os.str();
}

}  // namespace redcap
