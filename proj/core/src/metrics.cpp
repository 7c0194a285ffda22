#include "atomiclo/metrics.hpp"

#include <algorithm>
#include <limits>

#include "json_io.hpp"

namespace atomiclo {

std::string_view to_string(DistanceMode mode) noexcept {
  return mode == DistanceMode::PairwiseMin ? "PairwiseMin" : "SetRule";
}

DistanceMode parse_distance_mode(std::string_view text) {
  const auto key = detail::to_lower(detail::trim(text));
  if (key == "pairwisemin" || key == "pairwise_min" || key == "pairwise-min") {
    return DistanceMode::PairwiseMin;
  }
  if (key == "setrule" || key == "set_rule" || key == "set-rule") return DistanceMode::SetRule;
  throw Error(ErrorCode::ConfigInvalid, "unknown distance mode '" + std::string(text) + "'");
}

LabelSet LabelSet::resolve(std::span<const LOCode> codes, const Taxonomy& taxonomy) {
  LabelSet set;
  set.members_.reserve(codes.size());
  for (const auto& code : codes) {
    const auto& lo = taxonomy.at(code);
    if (!set.contains(code)) set.members_.push_back(&lo);
  }
  return set;
}

bool LabelSet::contains(const LOCode& code) const noexcept {
  return std::any_of(members_.begin(), members_.end(),
                     [&](const LearningObjective* lo) { return lo->code == code; });
}

bool LabelSet::has_name(std::string_view name) const noexcept {
  return std::any_of(members_.begin(), members_.end(),
                     [&](const LearningObjective* lo) { return lo->name == name; });
}

Overlap overlap(const LabelSet& predicted, const LabelSet& truth) {
  Overlap o;
  o.predicted = predicted.size();
  o.truth = truth.size();
  for (const auto* lo : predicted.members()) {
    if (truth.contains(lo->code)) ++o.intersection;
  }
  o.union_size = o.predicted + o.truth - o.intersection;
  return o;
}

int exact_match(const LabelSet& predicted, const LabelSet& truth) {
  const auto o = overlap(predicted, truth);
  return o.intersection == o.predicted && o.intersection == o.truth ? 1 : 0;
}

double jaccard(const LabelSet& predicted, const LabelSet& truth) {
  const auto o = overlap(predicted, truth);
  if (o.union_size == 0) return 1.0;
  return static_cast<double>(o.intersection) / static_cast<double>(o.union_size);
}

PrecisionRecallF1 precision_recall_f1(const LabelSet& predicted, const LabelSet& truth) {
  const auto o = overlap(predicted, truth);
  if (o.predicted == 0 && o.truth == 0) return {1.0, 1.0, 1.0};
  PrecisionRecallF1 r;
  const auto hits = static_cast<double>(o.intersection);
  r.precision = o.predicted == 0 ? 0.0 : hits / static_cast<double>(o.predicted);
  r.recall = o.truth == 0 ? 0.0 : hits / static_cast<double>(o.truth);
  // 2PR/(P+R) reduces to 2|F∩G| / (|F| + |G|); the integer form is exact.
  r.f1 = o.intersection == 0 ? 0.0
                             : 2.0 * hits / static_cast<double>(o.predicted + o.truth);
  return r;
}

int lo_distance(const LearningObjective& a, const LearningObjective& b) noexcept {
  if (a.code == b.code) return 0;
  if (a.name != b.name) return 3;
  if (a.action != b.action) return 2;
  return 1;
}

int unmatched_distance(const LearningObjective& lo, const LabelSet& other) noexcept {
  return other.has_name(lo.name) ? 1 : 2;
}

int set_distance(const LabelSet& predicted, const LabelSet& truth, DistanceMode mode) {
  int total = 0;
  if (mode == DistanceMode::PairwiseMin) {
    for (const auto* lo : predicted.members()) {
      if (truth.empty()) {
        total += unmatched_distance(*lo, truth);
        continue;
      }
      int best = std::numeric_limits<int>::max();
      for (const auto* other : truth.members()) best = std::min(best, lo_distance(*lo, *other));
      total += best;
    }
  } else {
    for (const auto* lo : predicted.members()) {
      if (!truth.contains(lo->code)) total += unmatched_distance(*lo, truth);
    }
  }
  for (const auto* lo : truth.members()) {
    if (!predicted.contains(lo->code)) total += unmatched_distance(*lo, predicted);
  }
  return total;
}

QuestionScore score_question(std::span<const LOCode> predicted, std::span<const LOCode> truth,
                             const Taxonomy& taxonomy, DistanceMode mode) {
  const auto f = LabelSet::resolve(predicted, taxonomy);
  const auto g = LabelSet::resolve(truth, taxonomy);
  QuestionScore s;
  s.counts = overlap(f, g);
  s.exact_match = exact_match(f, g);
  s.jaccard = jaccard(f, g);
  const auto prf = precision_recall_f1(f, g);
  s.precision = prf.precision;
  s.recall = prf.recall;
  s.f1 = prf.f1;
  s.distance = set_distance(f, g, mode);
  s.distance_mode = mode;
  return s;
}

}  // namespace atomiclo
