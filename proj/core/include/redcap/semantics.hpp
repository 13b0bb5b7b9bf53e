#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "redcap/caption.hpp"

namespace redcap {

/// Decides whether two words name the same object category: exact lemma
/// match, embedding cosine above a threshold, or a (transitive) hypernym /
/// hyponym link. Immutable once loaded; safe to share across threads.
class SemanticMatcher {
 public:
  SemanticMatcher() = default;

  /// Ablation mode: exact lemma equality only (threshold above any cosine,
  /// empty hypernym lexicon).
  static SemanticMatcher exact_only();

  void set_cosine_threshold(double t);
  double cosine_threshold() const noexcept { return cosine_threshold_; }

  /// Vectors are L2-normalized on insertion; the zero vector is rejected.
  void add_vector(const std::string& word, const std::vector<double>& v);
  void add_hypernym_edge(const std::string& hyponym, const std::string& hypernym);

  /// Transitive closure over the hypernym edges; throws ConfigError on cycles.
  void close_hypernyms();

  /// Text format: optional "count dim" header line, then "word v1 v2 ... vd".
  void load_vectors(const std::filesystem::path& file);
  /// TSV "hyponym<TAB>hypernym" edge per line; closes the relation afterward.
  void load_hypernyms(const std::filesystem::path& file);

  bool has_vector(const std::string& word) const;
  std::optional<double> cosine(const std::string& a, const std::string& b) const;
  /// True when a is a transitive hypernym of b or vice versa.
  bool hypernym_related(const std::string& a, const std::string& b) const;

  /// Symmetric same-category decision over lemmas.
  bool same_category(const std::string& a, const std::string& b) const;

  std::size_t vocabulary_size() const noexcept { return vectors_.size(); }

 private:
  double cosine_threshold_ = 0.55;
  bool closed_ = true;
  std::unordered_map<std::string, std::vector<double>> vectors_;
  std::unordered_map<std::string, std::unordered_set<std::string>> hypernyms_;
};

/// Semantic membership: target matches some element, full lemmatized phrase
/// equality first, then head-lemma same_category.
bool contains_object(const std::vector<NounPhrase>& objects, const NounPhrase& target,
                     const SemanticMatcher& m);

}  // namespace redcap
