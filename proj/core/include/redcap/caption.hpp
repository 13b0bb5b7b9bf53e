#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace redcap {

struct Token {
  std::string surface;
  std::string pos;    // coarse tag: NOUN, DET, ADP, CONJ, VERB, ADJ, ADV, PUNCT, NUM
  std::string lemma;  // lowercase singular form for nouns
  bool operator==(const Token&) const = default;
};

/// A caption plus its token stream. Tokens concatenate (modulo whitespace)
/// back to the text.
struct Caption {
  std::string text;
  std::vector<Token> tokens;
};

/// One extracted caption object: a maximal contiguous run of nouns.
struct NounPhrase {
  std::string surface;       // the run as written, space-joined
  std::string lemma;         // head noun lemma (last noun of the run)
  std::string phrase_lemma;  // all run lemmas space-joined
  std::size_t begin = 0;     // token span [begin, end)
  std::size_t end = 0;
  bool operator==(const NounPhrase&) const = default;
};

/// Lowercasing noun lemmatizer: irregular-plural lexicon first, then suffix
/// rules (-ies -> y, -es after sibilants, plain -s). Idempotent.
class Lemmatizer {
 public:
  Lemmatizer();
  static Lemmatizer from_file(const std::filesystem::path& irregular_tsv);

  void add_irregular(std::string plural, std::string singular);
  std::string lemma(std::string_view word) const;

 private:
  std::unordered_map<std::string, std::string> irregular_;
};

/// Deterministic fallback POS tagger: closed-class word lists plus a noun
/// default for everything else, so the pipeline runs with no external tagger.
class LexiconTagger {
 public:
  LexiconTagger();
  explicit LexiconTagger(Lemmatizer lemmatizer);

  void add_word(std::string surface, std::string pos);
  std::vector<Token> tag(const std::string& text) const;

 private:
  Lemmatizer lemmatizer_;
  std::unordered_map<std::string, std::string> lexicon_;
};

std::vector<std::string> tokenize(const std::string& text);
std::string lowercase(std::string_view s);

/// Object noun phrases of a caption: maximal contiguous noun runs, with any
/// noun directly preceding "of" dropped first (those act as quantifiers).
/// Duplicates are preserved in order.
std::vector<NounPhrase> extract_objects(const Caption& caption);

}  // namespace redcap
