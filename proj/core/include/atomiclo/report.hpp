#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atomiclo/runner.hpp"

namespace atomiclo {

/// One row of the results table, keyed by (dataset, model, strategy, format).
/// Failed cells are excluded from every mean and counted in `excluded`.
struct MetricRow {
  std::string dataset;
  std::string model_name;
  PromptStrategy strategy = PromptStrategy::Simple;
  LOFormat format = LOFormat::Structured;
  std::size_t exact_matches = 0;  // EM numerator
  std::size_t scored = 0;         // EM denominator
  std::size_t excluded = 0;
  double mean_jaccard = 0.0;
  double mean_f1 = 0.0;
  double mean_distance = 0.0;
  DistanceMode distance_mode = DistanceMode::PairwiseMin;
};

/// Rows ordered by dataset (first appearance), then the config's model,
/// strategy and format order.
std::vector<MetricRow> aggregate_table(const RunRecord& record);

/// Aligned plain-text table: EM as n/N, other metrics to three decimals.
std::string render_table_text(std::span<const MetricRow> rows);
std::string render_table_csv(std::span<const MetricRow> rows);
/// Full-precision machine-readable form.
std::string render_table_json(std::span<const MetricRow> rows);

/// Per-question label sets from a single labeler, plus the matching human
/// labels and the question's F1 under that labeler.
struct LabeledQuestion {
  std::string question_id;
  std::string chapter;
  std::vector<LOCode> truth;
  std::vector<LOCode> predicted;
  double f1 = 0.0;
};

/// Scored cells of one (model, strategy, format, sample) labeler.
std::vector<LabeledQuestion> labeled_questions(const RunRecord& record, std::string_view model,
                                               PromptStrategy strategy, LOFormat format,
                                               int sample = 0);

struct GroupMean {
  std::string group;
  double mean = 0.0;
  std::size_t questions = 0;
};

/// Mean label-set size per group, groups in order of first appearance.
/// Groups without questions do not appear.
std::vector<GroupMean> avg_lo_count(std::span<const std::pair<std::string, std::size_t>> group_sizes);

enum class HeatmapAxis { Human, Model };
std::string_view to_string(HeatmapAxis axis) noexcept;

struct HeatmapBucket {
  std::size_t lo_count = 0;
  double mean_f1 = 0.0;
  std::size_t questions = 0;
};

/// Buckets questions by the chosen labeler's LO count; ascending by count.
std::vector<HeatmapBucket> f1_by_count_heatmap(std::span<const LabeledQuestion> questions,
                                               HeatmapAxis axis);

struct LOFrequency {
  LOCode code;
  std::size_t count = 0;
};

/// Number of label sets containing each LO of `universe`, in universe order.
/// LOs that never occur are listed with count 0.
std::vector<LOFrequency> lo_frequency(std::span<const std::vector<LOCode>> label_sets,
                                      std::span<const LearningObjective> universe);

struct LOAccuracy {
  LOCode code;
  std::size_t support = 0;  // questions with the LO in the ground truth
  std::size_t hits = 0;     // ... that the labeler also predicted
  double accuracy = 0.0;
};

/// Per-LO recall over the ground truth, for LOs with support >= min_support.
/// Ordered by first appearance in the ground truth sets.
std::vector<LOAccuracy> per_lo_accuracy(std::span<const LabeledQuestion> questions,
                                        std::size_t min_support = 5);

/// Writes table.{txt,csv,json}, avg_lo_count.csv, heatmap.csv,
/// lo_frequency.csv, per_lo_accuracy.csv and analytics.json into `dir`.
void write_reports(const RunRecord& record, const Taxonomy& taxonomy,
                   const std::filesystem::path& dir, std::size_t min_support = 5);

}  // namespace atomiclo
