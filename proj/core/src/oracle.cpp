#include "redcap/oracle.hpp"

#include <algorithm>

#include "redcap/errors.hpp"

namespace redcap {

std::string to_string(Rule r) {
  switch (r) {
    case Rule::R1: return "R1";
    case Rule::R2: return "R2";
    case Rule::R3: return "R3";
  }
  return "?";
}

std::string to_string(CaptionSide s) {
  return s == CaptionSide::Source ? "source" : "followup";
}

std::string to_string(ErrorTypeHint h) {
  switch (h) {
    case ErrorTypeHint::Type1_1: return "Type1.1";
    case ErrorTypeHint::Type1_2: return "Type1.2";
    case ErrorTypeHint::Type2_1: return "Type2.1";
    case ErrorTypeHint::Type2_2: return "Type2.2";
    case ErrorTypeHint::Type3: return "Type3";
    case ErrorTypeHint::Unknown: return "Unknown";
  }
  return "Unknown";
}

namespace {

std::vector<NounPhrase> with_fate(const MetamorphicPair& mp, Fate fate) {
  std::vector<NounPhrase> out;
  for (const ObjectFate& f : mp.fates) {
    if (f.fate == fate) out.push_back(f.object);
  }
  return out;
}

}  // namespace

std::vector<NounPhrase> MetamorphicPair::retained() const {
  return with_fate(*this, Fate::Retain);
}
std::vector<NounPhrase> MetamorphicPair::ambiguous() const {
  return with_fate(*this, Fate::Ambiguous);
}
std::vector<NounPhrase> MetamorphicPair::disappeared() const {
  return with_fate(*this, Fate::Disappear);
}

std::vector<Violation> check_rule1(const MetamorphicPair& mp, const SemanticMatcher& m) {
  const auto followup_objects = extract_objects(mp.followup_caption);
  std::vector<Violation> out;
  for (const NounPhrase& o : mp.retained()) {
    if (!contains_object(followup_objects, o, m)) {
      out.push_back(Violation{mp.id, Rule::R1, o.lemma, CaptionSide::Followup,
                              ErrorTypeHint::Unknown});
    }
  }
  return out;
}

std::vector<Violation> check_rule2(const MetamorphicPair& mp, const SemanticMatcher& m) {
  const auto followup_objects = extract_objects(mp.followup_caption);
  std::vector<Violation> out;
  for (const NounPhrase& o : mp.disappeared()) {
    if (contains_object(followup_objects, o, m)) {
      out.push_back(Violation{mp.id, Rule::R2, o.lemma, CaptionSide::Followup,
                              ErrorTypeHint::Unknown});
    }
  }
  return out;
}

std::vector<Violation> check_rule3(const MetamorphicPair& mp, const SemanticMatcher& m) {
  std::vector<Violation> out;
  // The equivalence claim needs every object retained and located.
  if (!mp.ambiguous().empty() || !mp.disappeared().empty() ||
      !mp.localization.unlocated.empty()) {
    return out;
  }
  const auto source_objects = extract_objects(mp.source_caption);
  const auto followup_objects = extract_objects(mp.followup_caption);

  for (const NounPhrase& o : source_objects) {
    if (!contains_object(followup_objects, o, m)) {
      // Also surfaced by Rule 1; callers dedup.
      out.push_back(Violation{mp.id, Rule::R3, o.lemma, CaptionSide::Followup,
                              ErrorTypeHint::Unknown});
    }
  }
  for (const NounPhrase& o : followup_objects) {
    if (!contains_object(source_objects, o, m)) {
      // The source caption omitted something visible in the equivalent pair.
      out.push_back(Violation{mp.id, Rule::R3, o.lemma, CaptionSide::Source,
                              ErrorTypeHint::Type2_1});
    }
  }
  return out;
}

MpAssessment assess_mp(std::string id, const TransformSpec& spec,
                       const Caption& source_caption, const Caption& followup_caption,
                       const LocalizationMap& localization, const BitMask& m_tran,
                       const FateThresholds& thresholds, const SemanticMatcher& m) {
  thresholds.validate();
  MpAssessment out;
  out.mp.id = std::move(id);
  out.mp.spec = spec;
  out.mp.source_caption = source_caption;
  out.mp.followup_caption = followup_caption;
  out.mp.localization = localization;
  for (const LocatedObject& lo : localization.entries) {
    const double ratio = retain_ratio(lo.mask, m_tran);
    out.mp.fates.push_back(
        ObjectFate{lo.object, ratio, classify_fate(ratio, thresholds.t_down, thresholds.t_up)});
  }

  const auto source_objects = extract_objects(out.mp.source_caption);
  const auto followup_objects = extract_objects(out.mp.followup_caption);

  // A follow-up object with no source counterpart suggests the missing object
  // was re-described under a different name (follow-up misclassification).
  const bool novel_followup_name =
      std::any_of(followup_objects.begin(), followup_objects.end(),
                  [&](const NounPhrase& o) { return !contains_object(source_objects, o, m); });

  std::vector<Violation> violations;
  for (Violation v : check_rule1(out.mp, m)) {
    v.hint = novel_followup_name ? ErrorTypeHint::Type1_2 : ErrorTypeHint::Type2_2;
    violations.push_back(std::move(v));
  }
  for (Violation v : check_rule2(out.mp, m)) {
    v.hint = ErrorTypeHint::Type3;
    violations.push_back(std::move(v));
  }
  for (Violation v : check_rule3(out.mp, m)) {
    if (v.side == CaptionSide::Followup) continue;  // already flagged by Rule 1
    violations.push_back(std::move(v));
  }
  out.violations = std::move(violations);
  return out;
}

}  // namespace redcap
