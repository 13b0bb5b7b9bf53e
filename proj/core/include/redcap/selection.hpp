#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "redcap/alignment.hpp"
#include "redcap/transforms.hpp"

namespace redcap {

enum class Fate { Retain, Ambiguous, Disappear };

std::string to_string(Fate f);

struct FateThresholds {
  double t_down = 0.2;
  double t_up = 0.9;
  void validate() const;  // 0 <= t_down < t_up <= 1
};

/// Fraction of the object's location mask that survives the transformation:
/// |m_loc n m_tran| / |m_loc|. m_loc must be nonempty.
double retain_ratio(const BitMask& m_loc, const BitMask& m_tran);

/// Retain on [t_up, 1], Disappear on [0, t_down], Ambiguous between;
/// boundaries are closed.
Fate classify_fate(double ratio, double t_down, double t_up);

/// N_disappear - N_ambiguous.
int ambiguity_score(int n_disappear, int n_ambiguous);

/// Jaccard distance of the survival masks: 1 - |a n b| / |a u b|.
/// Both masks empty is an input-domain error.
double mask_difference(const BitMask& a, const BitMask& b);

/// Minimum mask_difference to the already selected set (must be nonempty).
double diversity_score(const BitMask& candidate,
                       const std::vector<const BitMask*>& selected);

struct ObjectFate {
  NounPhrase object;
  double ratio = 0.0;
  Fate fate = Fate::Ambiguous;
};

/// Fate bookkeeping for one candidate follow-up image.
struct CandidateAssessment {
  std::size_t index = 0;  // position in the generated candidate pool
  std::vector<ObjectFate> fates;
  int n_retain = 0;
  int n_ambiguous = 0;
  int n_disappear = 0;

  int score_ambiguity() const noexcept { return n_disappear - n_ambiguous; }
  bool valid_case() const noexcept { return n_retain + n_disappear > 0; }
};

CandidateAssessment assess_candidate(const LocalizationMap& localization,
                                     const TransformResult& candidate,
                                     const FateThresholds& thresholds);

std::vector<CandidateAssessment> assess_candidates(const LocalizationMap& localization,
                                                   const std::vector<TransformResult>& pool,
                                                   const FateThresholds& thresholds);

enum class SelectionMode { Full, NoAmbiguity, NoDiversity, Random };

/// Greedy selection of k follow-ups. First pick: argmax ambiguity score; each
/// later pick: argmax of min-max-normalized ambiguity + diversity over the
/// remaining pool (a constant column normalizes to 0). Ties break to the
/// lowest candidate index. Stops at k picks or pool exhaustion.
std::vector<std::size_t> select_followups(const std::vector<CandidateAssessment>& assessments,
                                          const std::vector<TransformResult>& pool,
                                          std::size_t k);

/// Ablation variants: NoAmbiguity picks the first follow-up at random (seeded)
/// and uses diversity alone afterwards; NoDiversity ranks by ambiguity only;
/// Random draws all picks at random without replacement.
std::vector<std::size_t> select_followups_mode(
    const std::vector<CandidateAssessment>& assessments,
    const std::vector<TransformResult>& pool, std::size_t k, SelectionMode mode,
    std::uint64_t seed);

}  // namespace redcap
