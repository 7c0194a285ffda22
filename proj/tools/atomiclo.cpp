// Command-line front end: validate inputs, run the labeling grid, re-score,
// render reports and serve the annotation API.

#include <csignal>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "atomiclo/annotation.hpp"
#include "atomiclo/corpus.hpp"
#include "atomiclo/experiment.hpp"
#include "atomiclo/report.hpp"
#include "atomiclo/runner.hpp"
#include "atomiclo/taxonomy.hpp"

namespace fs = std::filesystem;
using namespace atomiclo;

namespace {

constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitPartial = 3;

AnnotationServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_validate(const fs::path& taxonomy_path, const fs::path& corpus_path,
                 const fs::path& manifest_path, bool unlabeled) {
  const auto taxonomy = load_taxonomy(taxonomy_path);
  std::cout << "taxonomy: " << taxonomy.size() << " LOs in " << taxonomy.chapters().size()
            << " chapter(s)\n";
  int status = 0;

  if (!manifest_path.empty()) {
    const auto mismatches = validate_against_manifest(taxonomy, load_manifest(manifest_path));
    for (const auto& m : mismatches) {
      std::cout << "manifest mismatch: " << m.chapter << " " << m.field << " expected "
                << m.expected << ", found " << m.actual << "\n";
    }
    std::cout << "manifest: " << (mismatches.empty() ? "ok" : "MISMATCH") << "\n";
    if (!mismatches.empty()) status = kExitInvalid;
  }

  if (!corpus_path.empty()) {
    try {
      const auto corpus =
          load_corpus(corpus_path, taxonomy, unlabeled ? CorpusMode::Unlabeled : CorpusMode::Labeled);
      std::cout << "corpus: " << corpus.size() << " question(s)\n";
      for (const auto& row : corpus_stats(corpus)) {
        std::cout << "  " << row.chapter << " / " << row.source << " / " << row.dataset << ": "
                  << row.count << "\n";
      }
    } catch (const CorpusError& e) {
      for (const auto& issue : e.issues()) {
        std::cout << "corpus issue: " << issue.question_id << " " << to_string(issue.code) << " "
                  << issue.detail << "\n";
      }
      status = kExitInvalid;
    }
  }
  return status;
}

int cmd_run(const fs::path& config_path, const fs::path& output, const std::string& backend) {
  auto cfg = load_experiment_config(config_path);
  if (!output.empty()) cfg.output_dir = fs::absolute(output);
  if (!backend.empty()) cfg.backend = parse_backend_mode(backend);
  if (cfg.output_dir.empty()) throw Error(ErrorCode::ConfigInvalid, "no output directory given");

  const auto record = run_experiment(cfg);
  std::cout << render_table_text(aggregate_table(record));
  std::cout << record.cells.size() << " cell(s): " << record.scored_count() << " scored, "
            << record.failed_count() << " failed\n";
  if (record.failed_count() > 0) {
    std::map<std::string, std::size_t> by_code;
    for (const auto& cell : record.cells) {
      if (cell.failure) ++by_code[std::string(to_string(cell.failure->code))];
    }
    for (const auto& [code, n] : by_code) std::cout << "  " << code << ": " << n << "\n";
    std::cout << "see " << (cfg.output_dir / kFailuresFile).string() << "\n";
    return kExitPartial;
  }
  return 0;
}

int cmd_score(const fs::path& run_dir, const std::string& mode) {
  auto record = load_run(run_dir);
  const auto taxonomy = load_taxonomy(record.config.taxonomy_path);
  rescore(record, taxonomy, parse_distance_mode(mode));
  write_run(record, run_dir);
  write_reports(record, taxonomy, run_dir / kReportsDir);
  std::cout << render_table_text(aggregate_table(record));
  return 0;
}

int cmd_report(const fs::path& run_dir, const fs::path& out_dir, std::size_t min_support) {
  const auto record = load_run(run_dir);
  const auto taxonomy = load_taxonomy(record.config.taxonomy_path);
  write_reports(record, taxonomy, out_dir.empty() ? run_dir / kReportsDir : out_dir, min_support);
  std::cout << render_table_text(aggregate_table(record));
  return 0;
}

int cmd_serve(const fs::path& taxonomy_path, const fs::path& corpus_path, const fs::path& store,
              const std::string& host, int port, const fs::path& static_dir) {
  auto taxonomy = load_taxonomy(taxonomy_path);
  auto corpus = load_corpus(corpus_path, taxonomy, CorpusMode::Unlabeled);
  AnnotationStore annotations(std::move(taxonomy), std::move(corpus), store);
  AnnotationServer server(annotations, static_dir);
  const int bound = server.bind(host, port);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "serving on http://" << host << ":" << bound << "\n" << std::flush;
  server.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Atomic learning-objective labeling toolkit"};
  app.require_subcommand(1);

  fs::path taxonomy, corpus, manifest, config, output, run_dir, store, static_dir;
  std::string backend, mode = "PairwiseMin", host = "127.0.0.1";
  bool unlabeled = false;
  int port = 8080;
  std::size_t min_support = 5;

  auto* validate = app.add_subcommand("validate", "Check a taxonomy, corpus and manifest");
  validate->add_option("--taxonomy", taxonomy, "Taxonomy JSON")->required()->check(CLI::ExistingFile);
  validate->add_option("--corpus", corpus, "Corpus JSONL")->check(CLI::ExistingFile);
  validate->add_option("--manifest", manifest, "Expected per-chapter counts")->check(CLI::ExistingFile);
  validate->add_flag("--unlabeled", unlabeled, "Allow questions without ground truth");

  auto* run = app.add_subcommand("run", "Execute the labeling grid of an experiment config");
  run->add_option("config", config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "Run directory (overrides output_dir)");
  run->add_option("--backend", backend, "live, record or replay (overrides the config)");

  auto* score = app.add_subcommand("score", "Re-score a stored run");
  score->add_option("run_dir", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  score->add_option("--distance-mode", mode, "PairwiseMin or SetRule");

  auto* report = app.add_subcommand("report", "Render tables and analytics for a stored run");
  report->add_option("run_dir", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("-o,--output", output, "Report directory (default: <run_dir>/reports)");
  report->add_option("--min-support", min_support, "Minimum support for per-LO accuracy");

  auto* serve = app.add_subcommand("serve", "Start the annotation service");
  serve->add_option("--taxonomy", taxonomy, "Taxonomy JSON")->required()->check(CLI::ExistingFile);
  serve->add_option("--corpus", corpus, "Question bank JSONL")->required()->check(CLI::ExistingFile);
  serve->add_option("--store", store, "Annotation snapshot file")->required();
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--static-dir", static_dir, "Annotation UI assets served at /");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(taxonomy, corpus, manifest, unlabeled);
    if (*run) return cmd_run(config, output, backend);
    if (*score) return cmd_score(run_dir, mode);
    if (*report) return cmd_report(run_dir, output, min_support);
    if (*serve) return cmd_serve(taxonomy, corpus, store, host, port, static_dir);
  } catch (const CorpusError& e) {
    for (const auto& issue : e.issues()) {
      std::cerr << "corpus issue: " << issue.question_id << " " << to_string(issue.code) << " "
                << issue.detail << "\n";
    }
    return kExitInvalid;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
