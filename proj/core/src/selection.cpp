#include "redcap/selection.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "redcap/errors.hpp"

namespace redcap {

std::string to_string(Fate f) {
  switch (f) {
    case Fate::Retain: return "retain";
    case Fate::Ambiguous: return "ambiguous";
    case Fate::Disappear: return "disappear";
  }
  return "?";
}

void FateThresholds::validate() const {
  if (!(0.0 <= t_down && t_down < t_up && t_up <= 1.0)) {
    throw ConfigError("fate thresholds must satisfy 0 <= t_down < t_up <= 1, got " +
                      std::to_string(t_down) + " / " + std::to_string(t_up));
  }
}

double retain_ratio(const BitMask& m_loc, const BitMask& m_tran) {
  const std::size_t loc = mask_count(m_loc);
  if (loc == 0) {
    throw InputDomainError("retain_ratio: empty location mask");
  }
  return static_cast<double>(mask_intersection_count(m_loc, m_tran)) /
         static_cast<double>(loc);
}

Fate classify_fate(double ratio, double t_down, double t_up) {
  FateThresholds{t_down, t_up}.validate();
  if (ratio >= t_up) return Fate::Retain;
  if (ratio <= t_down) return Fate::Disappear;
  return Fate::Ambiguous;
}

int ambiguity_score(int n_disappear, int n_ambiguous) {
  return n_disappear - n_ambiguous;
}

double mask_difference(const BitMask& a, const BitMask& b) {
  const std::size_t uni = mask_union_count(a, b);
  if (uni == 0) {
    throw InputDomainError("mask_difference: both masks are empty");
  }
  const std::size_t inter = mask_intersection_count(a, b);
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

double diversity_score(const BitMask& candidate,
                       const std::vector<const BitMask*>& selected) {
  if (selected.empty()) {
    throw InputDomainError("diversity_score: selected set is empty");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const BitMask* s : selected) {
    best = std::min(best, mask_difference(candidate, *s));
  }
  return best;
}

CandidateAssessment assess_candidate(const LocalizationMap& localization,
                                     const TransformResult& candidate,
                                     const FateThresholds& thresholds) {
  thresholds.validate();
  CandidateAssessment a;
  for (const LocatedObject& lo : localization.entries) {
    const double ratio = retain_ratio(lo.mask, candidate.m_tran);
    const Fate fate = classify_fate(ratio, thresholds.t_down, thresholds.t_up);
    a.fates.push_back(ObjectFate{lo.object, ratio, fate});
    switch (fate) {
      case Fate::Retain: ++a.n_retain; break;
      case Fate::Ambiguous: ++a.n_ambiguous; break;
      case Fate::Disappear: ++a.n_disappear; break;
    }
  }
  return a;
}

std::vector<CandidateAssessment> assess_candidates(const LocalizationMap& localization,
                                                   const std::vector<TransformResult>& pool,
                                                   const FateThresholds& thresholds) {
  std::vector<CandidateAssessment> out;
  out.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    CandidateAssessment a = assess_candidate(localization, pool[i], thresholds);
    a.index = i;
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

/// Min-max normalization over the remaining pool; a constant column maps to 0.
std::vector<double> min_max_normalize(const std::vector<double>& values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  std::vector<double> out(values.size(), 0.0);
  const double span = *hi - *lo;
  if (span <= 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / span;
  return out;
}

std::size_t argmax_lowest_index(const std::vector<double>& scores,
                                const std::vector<std::size_t>& ids) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  (void)ids;
  return best;
}

}  // namespace

std::vector<std::size_t> select_followups(const std::vector<CandidateAssessment>& assessments,
                                          const std::vector<TransformResult>& pool,
                                          std::size_t k) {
  return select_followups_mode(assessments, pool, k, SelectionMode::Full, 0);
}

std::vector<std::size_t> select_followups_mode(
    const std::vector<CandidateAssessment>& assessments,
    const std::vector<TransformResult>& pool, std::size_t k, SelectionMode mode,
    std::uint64_t seed) {
  if (assessments.empty()) {
    throw InputDomainError("select_followups: empty candidate pool");
  }
  if (k < 1) {
    throw InputDomainError("select_followups: k must be >= 1");
  }
  if (assessments.size() != pool.size()) {
    throw InputDomainError("select_followups: assessments and pool sizes differ");
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> remaining(assessments.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  std::vector<std::size_t> selected;

  auto take = [&](std::size_t pos_in_remaining) {
    selected.push_back(remaining[pos_in_remaining]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pos_in_remaining));
  };

  // First pick.
  switch (mode) {
    case SelectionMode::NoAmbiguity:
    case SelectionMode::Random: {
      std::uniform_int_distribution<std::size_t> d(0, remaining.size() - 1);
      take(d(rng));
      break;
    }
    case SelectionMode::Full:
    case SelectionMode::NoDiversity: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < remaining.size(); ++i) {
        if (assessments[remaining[i]].score_ambiguity() >
            assessments[remaining[best]].score_ambiguity()) {
          best = i;
        }
      }
      take(best);
      break;
    }
  }

  while (selected.size() < k && !remaining.empty()) {
    if (mode == SelectionMode::Random) {
      std::uniform_int_distribution<std::size_t> d(0, remaining.size() - 1);
      take(d(rng));
      continue;
    }
    if (mode == SelectionMode::NoDiversity) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < remaining.size(); ++i) {
        if (assessments[remaining[i]].score_ambiguity() >
            assessments[remaining[best]].score_ambiguity()) {
          best = i;
        }
      }
      take(best);
      continue;
    }

    std::vector<const BitMask*> selected_masks;
    selected_masks.reserve(selected.size());
    for (std::size_t s : selected) selected_masks.push_back(&pool[s].m_tran);

    std::vector<double> amb(remaining.size());
    std::vector<double> div(remaining.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      amb[i] = static_cast<double>(assessments[remaining[i]].score_ambiguity());
      div[i] = diversity_score(pool[remaining[i]].m_tran, selected_masks);
    }

    std::vector<double> total(remaining.size(), 0.0);
    const std::vector<double> ndiv = min_max_normalize(div);
    if (mode == SelectionMode::Full) {
      const std::vector<double> namb = min_max_normalize(amb);
      for (std::size_t i = 0; i < total.size(); ++i) total[i] = namb[i] + ndiv[i];
    } else {  // NoAmbiguity: diversity alone drives later picks
      total = ndiv;
    }
    take(argmax_lowest_index(total, remaining));
  }
  return selected;
}

}  // namespace redcap
