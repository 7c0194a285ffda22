#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "atomiclo/taxonomy.hpp"

namespace atomiclo {

/// How unmatched predictions contribute to the set distance.
///
/// PairwiseMin: D = sum_{lo in F} min_{lo' in G} d(lo, lo')
///                + sum_{lo in G \ F} u(lo, F)
/// SetRule:     D = sum_{lo in F \ G} u(lo, G) + sum_{lo in G \ F} u(lo, F)
///
/// where d is the per-LO distance (0..3) and u the unmatched distance (1..2).
/// PairwiseMin falls back to u(lo, G) for the first term when G is empty.
enum class DistanceMode { PairwiseMin, SetRule };

std::string_view to_string(DistanceMode mode) noexcept;
DistanceMode parse_distance_mode(std::string_view text);

/// A set of LO codes resolved against a taxonomy. Members point into the
/// taxonomy, which must outlive the set.
class LabelSet {
 public:
  LabelSet() = default;

  /// Deduplicates (first occurrence wins). Throws Error{UnresolvedCode}.
  static LabelSet resolve(std::span<const LOCode> codes, const Taxonomy& taxonomy);

  std::span<const LearningObjective* const> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(const LOCode& code) const noexcept;
  bool has_name(std::string_view name) const noexcept;

 private:
  std::vector<const LearningObjective*> members_;
};

/// Exact counts behind the ratio metrics.
struct Overlap {
  std::size_t predicted = 0;     // |F|
  std::size_t truth = 0;         // |G|
  std::size_t intersection = 0;  // |F ∩ G|
  std::size_t union_size = 0;    // |F ∪ G|
};

Overlap overlap(const LabelSet& predicted, const LabelSet& truth);

/// 1 iff the code sets are equal (two empty sets are equal).
int exact_match(const LabelSet& predicted, const LabelSet& truth);

/// |F ∩ G| / |F ∪ G|, or 1 when both are empty.
double jaccard(const LabelSet& predicted, const LabelSet& truth);

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Zero denominators give 0; two empty sets give (1, 1, 1).
PrecisionRecallF1 precision_recall_f1(const LabelSet& predicted, const LabelSet& truth);

/// 3 if names differ; 2 if names match but actions differ; 1 if name and
/// action match but codes differ; 0 for the same code.
int lo_distance(const LearningObjective& a, const LearningObjective& b) noexcept;

/// 1 if `lo`'s name occurs in `other`, else 2.
int unmatched_distance(const LearningObjective& lo, const LabelSet& other) noexcept;

int set_distance(const LabelSet& predicted, const LabelSet& truth, DistanceMode mode);

struct QuestionScore {
  int exact_match = 0;
  double jaccard = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double distance = 0.0;
  DistanceMode distance_mode = DistanceMode::PairwiseMin;
  Overlap counts;
};

/// All metrics for one question. Throws Error{UnresolvedCode}.
QuestionScore score_question(std::span<const LOCode> predicted, std::span<const LOCode> truth,
                             const Taxonomy& taxonomy, DistanceMode mode);

}  // namespace atomiclo
