#include "redcap/caption.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "redcap/errors.hpp"

namespace redcap {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Lemmatizer::Lemmatizer() = default;

Lemmatizer Lemmatizer::from_file(const std::filesystem::path& irregular_tsv) {
  Lemmatizer lem;
  std::ifstream is(irregular_tsv);
  if (!is) throw ConfigError("cannot open irregular-plural file " + irregular_tsv.string());
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ConfigError("bad irregular-plural line (expected plural<TAB>singular): " + line);
    }
    lem.add_irregular(line.substr(0, tab), line.substr(tab + 1));
  }
  return lem;
}

void Lemmatizer::add_irregular(std::string plural, std::string singular) {
  irregular_[lowercase(plural)] = lowercase(singular);
}

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool sibilant_es(std::string_view stem) {
  // "boxes" -> "box", "dishes" -> "dish", "glasses" -> "glass"
  return ends_with(stem, "s") || ends_with(stem, "x") || ends_with(stem, "z") ||
         ends_with(stem, "ch") || ends_with(stem, "sh");
}

}  // namespace

std::string Lemmatizer::lemma(std::string_view word) const {
  std::string w = lowercase(word);
  if (auto it = irregular_.find(w); it != irregular_.end()) return it->second;
  if (w.size() > 3 && ends_with(w, "ies")) {
    return w.substr(0, w.size() - 3) + "y";
  }
  if (w.size() > 3 && ends_with(w, "es") && sibilant_es(std::string_view(w).substr(0, w.size() - 2))) {
    return w.substr(0, w.size() - 2);
  }
  if (w.size() > 2 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is")) {
    return w.substr(0, w.size() - 1);
  }
  return w;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':') {
      flush();
      out.push_back(std::string(1, c));
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

namespace {

const std::unordered_map<std::string, std::string>& builtin_lexicon() {
  static const std::unordered_map<std::string, std::string> lex = [] {
    std::unordered_map<std::string, std::string> m;
    for (const char* w : {"a", "an", "the", "this", "that", "these", "those"}) m[w] = "DET";
    for (const char* w : {"of", "on", "in", "at", "by", "to", "with", "under", "over",
                          "near", "behind", "beside", "above", "below", "next", "from",
                          "into", "onto"})
      m[w] = "ADP";
    for (const char* w : {"and", "or", "but"}) m[w] = "CONJ";
    for (const char* w : {"is", "are", "was", "were", "be", "being", "been", "sitting",
                          "standing", "sits", "stands", "holding", "holds", "parked",
                          "lying", "resting", "placed", "hanging", "flying", "floating"})
      m[w] = "VERB";
    for (const char* w : {"red", "green", "blue", "yellow", "purple", "orange", "black",
                          "white", "brown", "pink", "gray", "grey", "big", "small",
                          "large", "little", "tiny", "huge", "wooden", "plastic",
                          "bright", "dark"})
      m[w] = "ADJ";
    for (const char* w : {"very", "quite"}) m[w] = "ADV";
    return m;
  }();
  return lex;
}

bool is_punct(const std::string& s) {
  return s.size() == 1 && !std::isalnum(static_cast<unsigned char>(s[0]));
}

bool is_number(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c);
  });
}

}  // namespace

LexiconTagger::LexiconTagger() : LexiconTagger(Lemmatizer{}) {}

LexiconTagger::LexiconTagger(Lemmatizer lemmatizer)
    : lemmatizer_(std::move(lemmatizer)), lexicon_(builtin_lexicon()) {}

void LexiconTagger::add_word(std::string surface, std::string pos) {
  lexicon_[lowercase(surface)] = std::move(pos);
}

std::vector<Token> LexiconTagger::tag(const std::string& text) const {
  std::vector<Token> out;
  for (const std::string& surface : tokenize(text)) {
    Token t;
    t.surface = surface;
    const std::string low = lowercase(surface);
    if (auto it = lexicon_.find(low); it != lexicon_.end()) {
      t.pos = it->second;
      t.lemma = low;
    } else if (is_punct(surface)) {
      t.pos = "PUNCT";
      t.lemma = surface;
    } else if (is_number(surface)) {
      t.pos = "NUM";
      t.lemma = surface;
    } else {
      // Unknown words default to NOUN; the vocabulary of interest is open.
      t.pos = "NOUN";
      t.lemma = lemmatizer_.lemma(low);
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<NounPhrase> extract_objects(const Caption& caption) {
  const auto& toks = caption.tokens;
  std::vector<bool> keep(toks.size(), false);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].pos != "NOUN") continue;
    const bool before_of = i + 1 < toks.size() && lowercase(toks[i + 1].surface) == "of";
    keep[i] = !before_of;
  }

  std::vector<NounPhrase> out;
  std::size_t i = 0;
  while (i < toks.size()) {
    if (!keep[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < toks.size() && keep[j + 1]) ++j;
    NounPhrase np;
    np.begin = i;
    np.end = j + 1;
    for (std::size_t k = i; k <= j; ++k) {
      if (k > i) {
        np.surface += ' ';
        np.phrase_lemma += ' ';
      }
      np.surface += toks[k].surface;
      np.phrase_lemma += toks[k].lemma;
    }
    np.lemma = toks[j].lemma;  // head = last noun of the run
    out.push_back(std::move(np));
    i = j + 1;
  }
  return out;
}

}  // namespace redcap
