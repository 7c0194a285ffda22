#pragma once

#include <chrono>
#include <compare>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "atomiclo/corpus.hpp"
#include "atomiclo/experiment.hpp"
#include "atomiclo/llm_gateway.hpp"
#include "atomiclo/metrics.hpp"
#include "atomiclo/prompting.hpp"
#include "atomiclo/taxonomy.hpp"

namespace atomiclo {

/// Grid coordinates of one labeling request. Ordering is the canonical
/// merge order of run artifacts.
struct CellKey {
  std::string question_id;
  std::string model_name;
  PromptStrategy strategy = PromptStrategy::Simple;
  LOFormat format = LOFormat::Structured;
  int sample = 0;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

/// Parsed model output for one cell: raw reply, extracted codes (a subset of
/// the chapter's LOs) and provenance.
struct PredictionRecord {
  CellKey key;
  std::string fingerprint;
  std::string raw_text;
  std::vector<LOCode> predicted;
  std::vector<DroppedToken> dropped;
  std::chrono::milliseconds latency{0};
};

struct CellFailure {
  ErrorCode code = ErrorCode::NetworkError;
  std::string message;
};

struct CellOutcome {
  CellKey key;
  std::string chapter;
  std::string dataset;
  std::vector<LOCode> ground_truth;
  std::optional<PredictionRecord> prediction;
  std::optional<QuestionScore> score;
  std::optional<CellFailure> failure;

  bool scored() const noexcept { return score.has_value(); }
};

struct RunRecord {
  ExperimentConfig config;
  std::vector<CellOutcome> cells;  // sorted by CellKey
  std::string started_at;          // ISO-8601 UTC
  std::string finished_at;

  std::size_t scored_count() const noexcept;
  std::size_t failed_count() const noexcept;
};

/// Expected number of cells: questions x models x strategies x formats x samples.
std::size_t grid_size(const ExperimentConfig& cfg, std::size_t question_count) noexcept;

struct RunOptions {
  /// Used for live and record backends; defaults to the HTTP transport.
  std::shared_ptr<Transport> transport;
  /// Write the run directory (config, predictions, scores, reports).
  bool persist = true;
};

/// Executes every grid cell, up to cfg.parallelism at a time. Cell failures
/// are recorded, not thrown. Throws Error{ConfigInvalid} (and loader errors)
/// before any cell runs.
RunRecord run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Same as above with already-loaded inputs.
RunRecord run_experiment(const ExperimentConfig& cfg, const Taxonomy& taxonomy,
                         const Corpus& corpus, ChatClient& client);

/// Recomputes every score from the stored predictions with `mode`.
void rescore(RunRecord& record, const Taxonomy& taxonomy, DistanceMode mode);

// Run directory layout. predictions, scores, failures and reports are fully
// deterministic for a given input; wall-clock data lives in run_meta.json.
inline constexpr std::string_view kConfigFile = "config.json";
inline constexpr std::string_view kPredictionsFile = "predictions.jsonl";
inline constexpr std::string_view kScoresFile = "scores.jsonl";
inline constexpr std::string_view kFailuresFile = "failures.jsonl";
inline constexpr std::string_view kMetaFile = "run_meta.json";
inline constexpr std::string_view kReportsDir = "reports";

std::string serialize_predictions(const RunRecord& record);
std::string serialize_scores(const RunRecord& record);
std::string serialize_failures(const RunRecord& record);

/// Writes config, predictions, scores, failures and run_meta into `dir`.
void write_run(const RunRecord& record, const std::filesystem::path& dir);
void write_scores(const RunRecord& record, const std::filesystem::path& dir);

/// Reloads a run directory. Ground truth is taken from the corpus named in
/// the stored config; scores are recomputed with the stored distance mode.
RunRecord load_run(const std::filesystem::path& dir);

}  // namespace atomiclo
