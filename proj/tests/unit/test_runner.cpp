#include <filesystem>

#include <gtest/gtest.h>

#include "atomiclo/report.hpp"
#include "atomiclo/runner.hpp"
#include "fixture_transport.hpp"
#include "test_data.hpp"

namespace {

using namespace atomiclo;
using atomiclo::testing::code_of;
using atomiclo::testing::data_path;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "atomiclo_runner_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig fixture_config() {
  return load_experiment_config(data_path("experiments/energy_replay.json"));
}

RunRecord replay(ExperimentConfig cfg, std::shared_ptr<Transport> transport = nullptr) {
  if (!transport) transport = std::make_shared<atomiclo::testing::FailingTransport>();
  return run_experiment(cfg, {transport, !cfg.output_dir.empty()});
}

TEST(GridSize, Arithmetic) {
  auto cfg = fixture_config();
  EXPECT_EQ(grid_size(cfg, 9), 54u);
  cfg.samples_per_cell = 3;
  EXPECT_EQ(grid_size(cfg, 9), 162u);
  EXPECT_EQ(grid_size(cfg, 0), 0u);
}

TEST(ExperimentConfig, ResolvesPathsAgainstTheFile) {
  const auto cfg = fixture_config();
  EXPECT_TRUE(fs::exists(cfg.taxonomy_path));
  EXPECT_TRUE(fs::exists(cfg.corpus_path));
  EXPECT_EQ(cfg.backend, BackendMode::Replay);
  EXPECT_EQ(cfg.strategies.size(), 3u);
  EXPECT_EQ(cfg.formats.size(), 2u);
  const auto again = parse_experiment_config(serialize_experiment_config(cfg), "/");
  EXPECT_EQ(serialize_experiment_config(again), serialize_experiment_config(cfg));
}

TEST(ExperimentConfig, RejectsInvalidGrids) {
  const auto base = R"("taxonomy":"t.json","corpus":"c.jsonl","cassette":"k.json")";
  const std::string model = R"("models":[{"model_name":"m"}])";
  auto parse = [&](const std::string& body) {
    return code_of([&] { parse_experiment_config("{" + std::string(base) + "," + body + "}", "/tmp"); });
  };
  EXPECT_FALSE(parse(model + R"(,"strategies":["Simple"],"formats":["Structured"])"));
  EXPECT_EQ(parse(R"("models":[],"strategies":["Simple"],"formats":["Structured"])"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(parse(model + R"(,"strategies":[],"formats":["Structured"])"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(parse(model + R"(,"strategies":["Simple","simple"],"formats":["Structured"])"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(parse(model + R"(,"strategies":["Simple"],"formats":["Structured"],"parallelism":0)"),
            ErrorCode::ConfigInvalid);
  EXPECT_EQ(parse(model + R"(,"strategies":["Simple"],"formats":["Structured"],"backend":"live")"),
            ErrorCode::ConfigInvalid);  // live needs an endpoint
  EXPECT_EQ(parse(model + R"(,"strategies":["Simple"],"formats":["Yaml"])"), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_experiment_config("[", "/"); }), ErrorCode::ConfigInvalid);
}

TEST(RunExperiment, ReplayCoversTheWholeGridOffline) {
  auto transport = std::make_shared<atomiclo::testing::FailingTransport>();
  const auto record = replay(fixture_config(), transport);
  EXPECT_EQ(record.cells.size(), 54u);
  EXPECT_EQ(record.scored_count(), 54u);
  EXPECT_EQ(record.failed_count(), 0u);
  EXPECT_EQ(transport->calls.load(), 0);
  EXPECT_TRUE(std::is_sorted(record.cells.begin(), record.cells.end(),
                             [](const auto& a, const auto& b) { return a.key < b.key; }));
  const auto& taxonomy = atomiclo::testing::energy_taxonomy();
  for (const auto& cell : record.cells) {
    ASSERT_TRUE(cell.prediction);
    for (const auto& code : cell.prediction->predicted) {
      EXPECT_EQ(taxonomy.at(code).chapter, "Energy");
    }
  }
}

TEST(RunExperiment, MissingReplyIsRecordedNotThrown) {
  auto cfg = fixture_config();
  const auto dir = scratch("missing");
  auto entries = Cassette(cfg.cassette_path).entries();
  entries.erase(entries.begin());
  cfg.cassette_path = dir / "cassette.json";
  Cassette partial(cfg.cassette_path);
  for (const auto& [fp, reply] : entries) partial.record(fp, reply);

  const auto record = replay(cfg);
  EXPECT_EQ(record.cells.size(), 54u);
  EXPECT_EQ(record.scored_count(), 53u);
  ASSERT_EQ(record.failed_count(), 1u);
  const auto failed = std::find_if(record.cells.begin(), record.cells.end(),
                                   [](const auto& c) { return c.failure.has_value(); });
  EXPECT_EQ(failed->failure->code, ErrorCode::CassetteMiss);

  const auto rows = aggregate_table(record);
  std::size_t excluded = 0;
  for (const auto& row : rows) excluded += row.excluded;
  EXPECT_EQ(excluded, 1u);
}

TEST(RunExperiment, ReplayWithoutCassetteFileIsAConfigError) {
  auto cfg = fixture_config();
  cfg.cassette_path = scratch("nocassette") / "absent.json";
  EXPECT_EQ(code_of([&] { replay(cfg); }), ErrorCode::ConfigInvalid);
}

TEST(RunExperiment, OutputDoesNotDependOnParallelism) {
  auto cfg = fixture_config();
  cfg.parallelism = 1;
  const auto serial = replay(cfg);
  cfg.parallelism = 8;
  const auto parallel = replay(cfg);
  EXPECT_EQ(serialize_scores(serial), serialize_scores(parallel));
  EXPECT_EQ(serialize_predictions(serial), serialize_predictions(parallel));
}

TEST(RunExperiment, PersistedRunReloadsAndRescores) {
  auto cfg = fixture_config();
  cfg.output_dir = scratch("persist");
  const auto record = replay(cfg);
  for (auto name : {kConfigFile, kPredictionsFile, kScoresFile, kFailuresFile, kMetaFile}) {
    EXPECT_TRUE(fs::exists(cfg.output_dir / name)) << name;
  }
  EXPECT_TRUE(fs::exists(cfg.output_dir / kReportsDir / "table.txt"));

  auto loaded = load_run(cfg.output_dir);
  EXPECT_EQ(serialize_scores(loaded), serialize_scores(record));
  EXPECT_EQ(serialize_predictions(loaded), serialize_predictions(record));

  const auto taxonomy = load_taxonomy(cfg.taxonomy_path);
  rescore(loaded, taxonomy, DistanceMode::SetRule);
  EXPECT_EQ(loaded.config.distance_mode, DistanceMode::SetRule);
  for (const auto& cell : loaded.cells) EXPECT_EQ(cell.score->distance_mode, DistanceMode::SetRule);
  EXPECT_NE(serialize_scores(loaded), serialize_scores(record));
}

TEST(RunExperiment, RecordModeFillsACassette) {
  auto cfg = fixture_config();
  cfg.backend = BackendMode::Record;
  cfg.cassette_path = scratch("record") / "cassette.json";
  const auto taxonomy = load_taxonomy(cfg.taxonomy_path);
  const auto corpus = load_corpus(cfg.corpus_path, taxonomy, CorpusMode::Labeled);
  auto transport = std::make_shared<atomiclo::testing::FixtureTransport>(taxonomy, corpus);
  const auto record = run_experiment(cfg, {transport, false});
  EXPECT_EQ(record.scored_count(), 54u);
  EXPECT_EQ(transport->calls(), 54);
  EXPECT_EQ(Cassette(cfg.cassette_path).size(), 54u);
}

TEST(FixtureCassette, IsReproducibleFromTheGenerator) {
  auto cfg = fixture_config();
  const auto committed = Cassette(cfg.cassette_path).entries();
  cfg.backend = BackendMode::Record;
  cfg.cassette_path = scratch("regen") / "cassette.json";
  const auto taxonomy = load_taxonomy(cfg.taxonomy_path);
  const auto corpus = load_corpus(cfg.corpus_path, taxonomy, CorpusMode::Labeled);
  run_experiment(cfg, {std::make_shared<atomiclo::testing::FixtureTransport>(taxonomy, corpus), false});
  EXPECT_EQ(Cassette(cfg.cassette_path).entries(), committed);
}

TEST(RunExperiment, SamplesGetDistinctFingerprints) {
  auto cfg = fixture_config();
  cfg.backend = BackendMode::Record;
  cfg.samples_per_cell = 2;
  cfg.strategies = {PromptStrategy::Simple};
  cfg.formats = {LOFormat::Structured};
  cfg.cassette_path = scratch("samples") / "cassette.json";
  const auto taxonomy = load_taxonomy(cfg.taxonomy_path);
  const auto corpus = load_corpus(cfg.corpus_path, taxonomy, CorpusMode::Labeled);
  const auto record = run_experiment(
      cfg, {std::make_shared<atomiclo::testing::FixtureTransport>(taxonomy, corpus), false});
  EXPECT_EQ(record.cells.size(), 18u);
  EXPECT_EQ(Cassette(cfg.cassette_path).size(), 18u);
}

}  // namespace
