#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "atomiclo/llm_gateway.hpp"
#include "atomiclo/metrics.hpp"
#include "atomiclo/prompting.hpp"

namespace atomiclo {

/// One experiment grid: every question is labeled by every model under every
/// strategy and format, `samples_per_cell` times.
struct ExperimentConfig {
  std::filesystem::path taxonomy_path;
  std::filesystem::path corpus_path;
  std::vector<ModelConfig> models;
  std::vector<PromptStrategy> strategies;
  std::vector<LOFormat> formats;
  BackendMode backend = BackendMode::Replay;
  std::filesystem::path cassette_path;
  std::filesystem::path output_dir;
  int parallelism = 1;
  DistanceMode distance_mode = DistanceMode::PairwiseMin;
  int samples_per_cell = 1;

  /// Throws Error{ConfigInvalid}.
  void validate() const;
  const ModelConfig* find_model(std::string_view name) const noexcept;
};

/// Relative paths in the document are resolved against `base_dir`.
ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string serialize_experiment_config(const ExperimentConfig& cfg);

}  // namespace atomiclo
