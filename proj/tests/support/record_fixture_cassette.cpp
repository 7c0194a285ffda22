// Regenerates the replay cassette for an experiment config using the
// deterministic fixture transport.
//
//   record_fixture_cassette data/experiments/energy_replay.json

#include <filesystem>
#include <iostream>

#include "atomiclo/runner.hpp"
#include "fixture_transport.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: " << argv[0] << " <experiment.json>\n";
    return 2;
  }
  try {
    auto cfg = atomiclo::load_experiment_config(argv[1]);
    const auto taxonomy = atomiclo::load_taxonomy(cfg.taxonomy_path);
    const auto corpus = atomiclo::load_corpus(cfg.corpus_path, taxonomy, atomiclo::CorpusMode::Labeled);
    std::filesystem::remove(cfg.cassette_path);
    cfg.backend = atomiclo::BackendMode::Record;
    auto transport = std::make_shared<atomiclo::testing::FixtureTransport>(taxonomy, corpus);
    const auto record = atomiclo::run_experiment(cfg, {transport, false});
    std::cout << "recorded " << transport->calls() << " replies into " << cfg.cassette_path.string()
              << " (" << record.failed_count() << " failed cells)\n";
    return record.failed_count() == 0 ? 0 : 1;
  } catch (const atomiclo::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
