#pragma once

#include <string>
#include <vector>

#include "redcap/selection.hpp"

namespace redcap {

enum class Rule { R1, R2, R3 };
enum class CaptionSide { Source, Followup };
enum class ErrorTypeHint { Type1_1, Type1_2, Type2_1, Type2_2, Type3, Unknown };

std::string to_string(Rule r);
std::string to_string(CaptionSide s);
std::string to_string(ErrorTypeHint h);

/// One rule breach. R1: a retained object missing from the follow-up caption.
/// R2: a disappeared object still described. R3: unequal object sets for an
/// equivalent pair.
struct Violation {
  std::string mp_id;
  Rule rule = Rule::R1;
  std::string object;  // head lemma of the implicated object
  CaptionSide side = CaptionSide::Followup;
  ErrorTypeHint hint = ErrorTypeHint::Unknown;
};

/// A source/follow-up pair with the fate partition of the located source
/// caption objects.
struct MetamorphicPair {
  std::string id;
  TransformSpec spec;
  Caption source_caption;
  Caption followup_caption;
  LocalizationMap localization;
  std::vector<ObjectFate> fates;  // located objects only

  std::vector<NounPhrase> retained() const;
  std::vector<NounPhrase> ambiguous() const;
  std::vector<NounPhrase> disappeared() const;
};

/// Rule 1: every retained object must still be described in the follow-up.
std::vector<Violation> check_rule1(const MetamorphicPair& mp, const SemanticMatcher& m);

/// Rule 2: a disappeared object must not be described in the follow-up.
std::vector<Violation> check_rule2(const MetamorphicPair& mp, const SemanticMatcher& m);

/// Rule 3: with nothing ambiguous, nothing disappeared and nothing unlocated,
/// the two object sets must be semantically equivalent; each uncovered object
/// on either side is one violation.
std::vector<Violation> check_rule3(const MetamorphicPair& mp, const SemanticMatcher& m);

struct MpAssessment {
  MetamorphicPair mp;
  std::vector<Violation> violations;
};

/// Computes fates from the localization map and the survival mask, runs rules
/// 1-3, deduplicates (an object flagged by R1 is not re-flagged by R3) and
/// attaches heuristic error-type hints.
MpAssessment assess_mp(std::string id, const TransformSpec& spec,
                       const Caption& source_caption, const Caption& followup_caption,
                       const LocalizationMap& localization, const BitMask& m_tran,
                       const FateThresholds& thresholds, const SemanticMatcher& m);

}  // namespace redcap
