#include <random>
#include <set>

#include <benchmark/benchmark.h>

#include "atomiclo/corpus.hpp"
#include "atomiclo/llm_gateway.hpp"
#include "atomiclo/metrics.hpp"
#include "atomiclo/prompting.hpp"

namespace {

using namespace atomiclo;

const Taxonomy& newtons() {
  static const Taxonomy t = load_taxonomy(ATOMICLO_DATA_DIR "/taxonomy/newtons_laws.json");
  return t;
}

std::vector<LOCode> random_subset(std::mt19937& rng, std::span<const LearningObjective> los,
                                  std::size_t n) {
  std::vector<LOCode> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(los[rng() % los.size()].code);
  return out;
}

void BM_SetDistance(benchmark::State& state) {
  const auto& tax = newtons();
  const auto mode = static_cast<DistanceMode>(state.range(1));
  std::mt19937 rng(7);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = LabelSet::resolve(random_subset(rng, tax.objectives(), n), tax);
  const auto g = LabelSet::resolve(random_subset(rng, tax.objectives(), n), tax);
  for (auto _ : state) benchmark::DoNotOptimize(set_distance(f, g, mode));
}
BENCHMARK(BM_SetDistance)->ArgsProduct({{2, 6, 20}, {0, 1}});

void BM_ScoreQuestion(benchmark::State& state) {
  const auto& tax = newtons();
  std::mt19937 rng(11);
  const auto f = random_subset(rng, tax.objectives(), 6);
  const auto g = random_subset(rng, tax.objectives(), 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_question(f, g, tax, DistanceMode::PairwiseMin));
  }
}
BENCHMARK(BM_ScoreQuestion);

void BM_ParsePrediction(benchmark::State& state) {
  const auto& tax = newtons();
  std::set<LOCode> allowed;
  for (const auto& lo : tax.objectives()) allowed.insert(lo.code);
  std::string reply;
  for (const auto& lo : tax.objectives()) {
    reply += lo.code.str() + ": " + lo.name + " applies because the question asks for it.\n";
  }
  reply += "Ignore ME-KE-1 and XX-1-0.";
  for (auto _ : state) benchmark::DoNotOptimize(parse_prediction(reply, allowed));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * reply.size()));
}
BENCHMARK(BM_ParsePrediction);

void BM_BuildPrompt(benchmark::State& state) {
  const auto& tax = newtons();
  const auto los = tax.subset_by_chapter("Newton's Laws");
  Question q;
  q.id = "bench";
  q.chapter = "Newton's Laws";
  q.text = "A 5 kg box is pushed across a rough floor with a constant force of 20 N.";
  const auto strategy = static_cast<PromptStrategy>(state.range(0));
  const auto format = static_cast<LOFormat>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(build_prompt(q, los, strategy, format));
}
BENCHMARK(BM_BuildPrompt)->ArgsProduct({{0, 1, 2}, {0, 1}});

void BM_Fingerprint(benchmark::State& state) {
  ModelConfig cfg;
  cfg.model_name = "bench";
  const std::string prompt(static_cast<std::size_t>(state.range(0)), 'x');
  for (auto _ : state) benchmark::DoNotOptimize(request_fingerprint(cfg, prompt));
}
BENCHMARK(BM_Fingerprint)->Arg(1 << 10)->Arg(1 << 14);

}  // namespace

BENCHMARK_MAIN();
