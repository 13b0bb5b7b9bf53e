#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "redcap/errors.hpp"
#include "redcap/harness.hpp"

namespace redcap {

namespace {

using nlohmann::json;

std::string html_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::vector<json> read_jsonl(const std::filesystem::path& file, bool required) {
  std::vector<json> out;
  std::ifstream is(file);
  if (!is) {
    if (required) throw ConfigError("missing run artifact: " + file.string());
    return out;
  }
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (!j.is_discarded()) out.push_back(std::move(j));
  }
  return out;
}

}  // namespace

ReportSummary emit_report(const std::filesystem::path& run_dir) {
  if (!std::filesystem::exists(run_dir / "manifest.json")) {
    throw ConfigError("missing run artifact: " + (run_dir / "manifest.json").string());
  }
  std::ifstream mf(run_dir / "manifest.json");
  json manifest = json::parse(mf, nullptr, false);
  if (manifest.is_discarded()) throw ConfigError("manifest.json is not valid JSON");

  const std::vector<json> mps = read_jsonl(run_dir / "mps.jsonl", true);
  const std::vector<json> violations = read_jsonl(run_dir / "violations.jsonl", false);

  std::map<std::string, std::vector<json>> violations_by_mp;
  ReportSummary summary;
  for (const json& v : violations) {
    violations_by_mp[v.value("mp_id", "")].push_back(v);
    ++summary.violations;
    ++summary.violations_by_rule[v.value("rule", "?")];
  }
  summary.sources = manifest["totals"].value("sources_assessed", 0) +
                    manifest["totals"].value("sources_skipped", 0);

  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">\n"
       << "<title>redcap run report</title>\n"
       << "<style>\n"
       << "body{font-family:sans-serif;margin:1.5em;background:#fafafa}\n"
       << ".mp{border:1px solid #ccc;border-radius:6px;padding:1em;margin:1em 0;"
          "background:#fff}\n"
       << ".violation{color:#a00;font-weight:bold}\n"
       << ".fate{display:inline-block;margin-right:1em}\n"
       << "img{max-width:320px;border:1px solid #ddd;margin-right:1em}\n"
       << "table{border-collapse:collapse}td,th{border:1px solid #ccc;padding:2px 8px}\n"
       << "</style></head><body>\n";
  html << "<h1>redcap run report</h1>\n";
  html << "<p>config hash <code>" << manifest.value("config_hash", "") << "</code>, "
       << "content hash <code>" << manifest.value("content_hash", "") << "</code></p>\n";

  html << "<table><tr><th>sources assessed</th><th>sources skipped</th><th>MPs</th>"
       << "<th>violations</th></tr><tr>"
       << "<td>" << manifest["totals"].value("sources_assessed", 0) << "</td>"
       << "<td>" << manifest["totals"].value("sources_skipped", 0) << "</td>"
       << "<td>" << manifest["totals"].value("mps", 0) << "</td>"
       << "<td>" << manifest["totals"].value("violations", 0) << "</td>"
       << "</tr></table>\n";

  for (const json& mp : mps) {
    if (mp.value("skip", false)) {
      html << "<div class=\"mp\"><b>skipped:</b> " << html_escape(mp.value("source", ""))
           << " &mdash; " << html_escape(mp.value("reason", ""));
      if (mp.contains("mr")) html << " (" << html_escape(mp.value("mr", "")) << ")";
      html << "</div>\n";
      continue;
    }
    ++summary.mps;
    const std::string id = mp.value("mp_id", "");
    html << "<div class=\"mp\" id=\"" << html_escape(id) << "\">\n";
    html << "<h3>" << html_escape(id) << "</h3>\n";
    html << "<p><b>transform:</b> <code>" << html_escape(mp["spec"].dump()) << "</code></p>\n";
    html << "<p><img src=\"" << html_escape(mp.value("followup_image", "")) << "\" alt=\""
         << html_escape(id) << "\"></p>\n";
    html << "<p><b>source:</b> " << html_escape(mp.value("source_caption", "")) << "<br>\n";
    html << "<b>follow-up:</b> " << html_escape(mp.value("followup_caption", "")) << "</p>\n";
    html << "<p>";
    for (const json& f : mp.value("fates", json::array())) {
      char ratio[32];
      std::snprintf(ratio, sizeof(ratio), "%.3f", f.value("ratio", 0.0));
      html << "<span class=\"fate\">" << html_escape(f.value("object", "")) << ": "
           << html_escape(f.value("fate", "")) << " (" << ratio << ")</span>";
    }
    for (const json& u : mp.value("unlocated", json::array())) {
      html << "<span class=\"fate\">" << html_escape(u.get<std::string>())
           << ": unlocated</span>";
    }
    html << "</p>\n";
    const auto it = violations_by_mp.find(id);
    if (it != violations_by_mp.end()) {
      html << "<ul>\n";
      for (const json& v : it->second) {
        html << "<li class=\"violation\">" << html_escape(v.value("rule", "")) << " on \""
             << html_escape(v.value("object", "")) << "\" (" << html_escape(v.value("side", ""))
             << " caption, hint " << html_escape(v.value("hint", "")) << ")</li>\n";
      }
      html << "</ul>\n";
    } else {
      html << "<p>no violations</p>\n";
    }
    html << "</div>\n";
  }
  html << "</body></html>\n";

  {
    std::ofstream os(run_dir / "report.html");
    if (!os) throw ConfigError("cannot write report.html");
    os << html.str();
  }

  json sj;
  sj["sources"] = summary.sources;
  sj["mps"] = summary.mps;
  sj["violations"] = summary.violations;
  sj["by_rule"] = summary.violations_by_rule;
  sj["config_hash"] = manifest.value("config_hash", "");
  sj["content_hash"] = manifest.value("content_hash", "");
  {
    std::ofstream os(run_dir / "summary.json");
    if (!os) throw ConfigError("cannot write summary.json");
    os << sj.dump(2) << "\n";
  }
  return summary;
}

}  // namespace redcap
