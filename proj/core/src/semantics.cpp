#include "redcap/semantics.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "redcap/errors.hpp"

namespace redcap {

SemanticMatcher SemanticMatcher::exact_only() {
  SemanticMatcher m;
  m.cosine_threshold_ = 1.01;  // above any attainable cosine
  return m;
}

void SemanticMatcher::set_cosine_threshold(double t) {
  if (!(t > 0.0)) throw ConfigError("cosine threshold must be positive");
  cosine_threshold_ = t;
}

void SemanticMatcher::add_vector(const std::string& word, const std::vector<double>& v) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 <= 0.0) throw ConfigError("zero vector for word '" + word + "'");
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<double> unit(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) unit[i] = v[i] * inv;
  vectors_[lowercase(word)] = std::move(unit);
}

void SemanticMatcher::add_hypernym_edge(const std::string& hyponym,
                                        const std::string& hypernym) {
  hypernyms_[lowercase(hyponym)].insert(lowercase(hypernym));
  closed_ = false;
}

void SemanticMatcher::close_hypernyms() {
  // Depth-first closure with cycle detection.
  enum class State { Fresh, Active, Done };
  std::unordered_map<std::string, State> state;
  std::function<void(const std::string&)> visit = [&](const std::string& node) {
    auto& st = state[node];
    if (st == State::Active) {
      throw ConfigError("hypernym lexicon contains a cycle through '" + node + "'");
    }
    if (st == State::Done) return;
    st = State::Active;
    auto it = hypernyms_.find(node);
    if (it != hypernyms_.end()) {
      const std::unordered_set<std::string> direct = it->second;
      for (const auto& parent : direct) {
        visit(parent);
        auto pit = hypernyms_.find(parent);
        if (pit != hypernyms_.end()) {
          hypernyms_[node].insert(pit->second.begin(), pit->second.end());
        }
      }
    }
    state[node] = State::Done;
  };
  std::vector<std::string> nodes;
  nodes.reserve(hypernyms_.size());
  for (const auto& [node, _] : hypernyms_) nodes.push_back(node);
  for (const auto& node : nodes) visit(node);
  closed_ = true;
}

void SemanticMatcher::load_vectors(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("cannot open vector file " + file.string());
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (first) {
      first = false;
      // Optional "count dim" header: a numeric token with exactly one value.
      if (v.size() == 1 && !word.empty() &&
          word.find_first_not_of("0123456789") == std::string::npos) {
        continue;
      }
    }
    if (v.empty()) throw ConfigError("vector line without components: " + line);
    add_vector(word, v);
  }
}

void SemanticMatcher::load_hypernyms(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("cannot open hypernym file " + file.string());
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ConfigError("bad hypernym line (expected hyponym<TAB>hypernym): " + line);
    }
    add_hypernym_edge(line.substr(0, tab), line.substr(tab + 1));
  }
  close_hypernyms();
}

bool SemanticMatcher::has_vector(const std::string& word) const {
  return vectors_.contains(lowercase(word));
}

std::optional<double> SemanticMatcher::cosine(const std::string& a,
                                              const std::string& b) const {
  const auto ia = vectors_.find(lowercase(a));
  const auto ib = vectors_.find(lowercase(b));
  if (ia == vectors_.end() || ib == vectors_.end()) return std::nullopt;
  if (ia->second.size() != ib->second.size()) return std::nullopt;
  double dot = 0.0;
  for (std::size_t i = 0; i < ia->second.size(); ++i) dot += ia->second[i] * ib->second[i];
  return dot;
}

bool SemanticMatcher::hypernym_related(const std::string& a, const std::string& b) const {
  const std::string la = lowercase(a);
  const std::string lb = lowercase(b);
  if (auto it = hypernyms_.find(la); it != hypernyms_.end() && it->second.contains(lb)) {
    return true;
  }
  if (auto it = hypernyms_.find(lb); it != hypernyms_.end() && it->second.contains(la)) {
    return true;
  }
  return false;
}

bool SemanticMatcher::same_category(const std::string& a, const std::string& b) const {
  const std::string la = lowercase(a);
  const std::string lb = lowercase(b);
  if (la == lb) return true;
  if (const auto cos = cosine(la, lb); cos && *cos >= cosine_threshold_) return true;
  return hypernym_related(la, lb);
}

bool contains_object(const std::vector<NounPhrase>& objects, const NounPhrase& target,
                     const SemanticMatcher& m) {
  for (const NounPhrase& o : objects) {
    if (!o.phrase_lemma.empty() && o.phrase_lemma == target.phrase_lemma) return true;
    if (m.same_category(o.lemma, target.lemma)) return true;
  }
  return false;
}

}  // namespace redcap
