#include "atomiclo/runner.hpp"

#include <algorithm>
#include <atomic>
#include <ctime>
#include <map>
#include <thread>

#include "atomiclo/report.hpp"
#include "json_io.hpp"

namespace atomiclo {

namespace {

using detail::Json;
using detail::OrderedJson;

OrderedJson key_json(const CellKey& key) {
  OrderedJson obj;
  obj["question_id"] = key.question_id;
  obj["model"] = key.model_name;
  obj["strategy"] = to_string(key.strategy);
  obj["format"] = to_string(key.format);
  obj["sample"] = key.sample;
  return obj;
}

CellKey key_from_json(const Json& obj) {
  CellKey key;
  key.question_id = obj.at("question_id").get<std::string>();
  key.model_name = obj.at("model").get<std::string>();
  key.strategy = parse_strategy(obj.at("strategy").get<std::string>());
  key.format = parse_format(obj.at("format").get<std::string>());
  key.sample = obj.value("sample", 0);
  return key;
}

OrderedJson codes_json(const std::vector<LOCode>& codes) {
  auto arr = OrderedJson::array();
  for (const auto& c : codes) arr.push_back(c.str());
  return arr;
}

std::vector<LOCode> codes_from_json(const Json& arr) {
  std::vector<LOCode> codes;
  for (const auto& c : arr) codes.push_back(parse_lo_code(c.get<std::string>()));
  return codes;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!detail::trim(line).empty()) fn(line);
  }
}

std::string dump_line(const OrderedJson& obj) {
  return obj.dump(-1, ' ', false, OrderedJson::error_handler_t::replace) + "\n";
}

}  // namespace

std::size_t RunRecord::scored_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const CellOutcome& c) { return c.scored(); }));
}

std::size_t RunRecord::failed_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      cells.begin(), cells.end(), [](const CellOutcome& c) { return c.failure.has_value(); }));
}

std::size_t grid_size(const ExperimentConfig& cfg, std::size_t question_count) noexcept {
  return question_count * cfg.models.size() * cfg.strategies.size() * cfg.formats.size() *
         static_cast<std::size_t>(std::max(cfg.samples_per_cell, 0));
}

RunRecord run_experiment(const ExperimentConfig& cfg, const Taxonomy& taxonomy,
                         const Corpus& corpus, ChatClient& client) {
  cfg.validate();
  RunRecord record;
  record.config = cfg;
  record.started_at = detail::utc_now();

  struct ChapterSubset {
    std::vector<LearningObjective> los;
    std::set<LOCode> allowed;
  };
  std::map<std::string, ChapterSubset, std::less<>> subsets;
  std::map<std::string, const Question*, std::less<>> questions;
  for (const auto& q : corpus.questions()) {
    questions.emplace(q.id, &q);
    if (subsets.contains(q.chapter)) continue;
    ChapterSubset s;
    s.los = taxonomy.subset_by_chapter(q.chapter);
    for (const auto& lo : s.los) s.allowed.insert(lo.code);
    subsets.emplace(q.chapter, std::move(s));
  }

  for (const auto& q : corpus.questions()) {
    for (const auto& m : cfg.models) {
      for (auto s : cfg.strategies) {
        for (auto f : cfg.formats) {
          for (int sample = 0; sample < cfg.samples_per_cell; ++sample) {
            CellOutcome cell;
            cell.key = {q.id, m.model_name, s, f, sample};
            cell.chapter = q.chapter;
            cell.dataset = q.dataset;
            cell.ground_truth = q.ground_truth;
            record.cells.push_back(std::move(cell));
          }
        }
      }
    }
  }
  std::sort(record.cells.begin(), record.cells.end(),
            [](const CellOutcome& a, const CellOutcome& b) { return a.key < b.key; });

  auto run_cell = [&](CellOutcome& cell) {
    const auto& question = *questions.at(cell.key.question_id);
    const auto& subset = subsets.at(cell.chapter);
    const auto& model = *cfg.find_model(cell.key.model_name);
    try {
      const auto prompt = build_prompt(question, subset.los, cell.key.strategy, cell.key.format);
      const auto started = std::chrono::steady_clock::now();
      auto reply = client.complete(prompt.rendered_text, model, cell.key.sample);
      const auto elapsed = std::chrono::steady_clock::now() - started;

      PredictionRecord prediction;
      prediction.key = cell.key;
      prediction.fingerprint = request_fingerprint(model, prompt.rendered_text, cell.key.sample);
      auto parsed = parse_prediction(reply, subset.allowed);
      prediction.raw_text = std::move(reply);
      prediction.predicted = std::move(parsed.predicted);
      prediction.dropped = std::move(parsed.dropped);
      prediction.latency = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed);
      cell.score = score_question(prediction.predicted, cell.ground_truth, taxonomy, cfg.distance_mode);
      cell.prediction = std::move(prediction);
    } catch (const Error& e) {
      cell.failure = CellFailure{e.code(), e.what()};
    } catch (const std::exception& e) {
      cell.failure = CellFailure{ErrorCode::IoError, e.what()};
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.parallelism),
                                             std::max<std::size_t>(record.cells.size(), 1));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (auto i = next.fetch_add(1); i < record.cells.size(); i = next.fetch_add(1)) {
          run_cell(record.cells[i]);
        }
      });
    }
  }
  record.finished_at = detail::utc_now();
  return record;
}

RunRecord run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const auto taxonomy = load_taxonomy(cfg.taxonomy_path);
  const auto corpus = load_corpus(cfg.corpus_path, taxonomy, CorpusMode::Labeled);

  std::shared_ptr<Cassette> cassette;
  if (cfg.backend != BackendMode::Live) {
    if (cfg.backend == BackendMode::Replay && !std::filesystem::exists(cfg.cassette_path)) {
      throw Error(ErrorCode::ConfigInvalid, "cassette not found: " + cfg.cassette_path.string());
    }
    cassette = std::make_shared<Cassette>(cfg.cassette_path);
  }
  auto transport = options.transport;
  if (!transport && cfg.backend != BackendMode::Replay) transport = make_http_transport();

  ChatClient client(cfg.backend, transport, cassette, static_cast<std::size_t>(cfg.parallelism));
  auto record = run_experiment(cfg, taxonomy, corpus, client);
  if (options.persist && !cfg.output_dir.empty()) {
    write_run(record, cfg.output_dir);
    write_reports(record, taxonomy, cfg.output_dir / kReportsDir);
  }
  return record;
}

void rescore(RunRecord& record, const Taxonomy& taxonomy, DistanceMode mode) {
  record.config.distance_mode = mode;
  for (auto& cell : record.cells) {
    if (!cell.prediction) continue;
    cell.score = score_question(cell.prediction->predicted, cell.ground_truth, taxonomy, mode);
  }
}

std::string serialize_predictions(const RunRecord& record) {
  std::string out;
  for (const auto& cell : record.cells) {
    if (!cell.prediction) continue;
    const auto& p = *cell.prediction;
    auto obj = key_json(cell.key);
    obj["fingerprint"] = p.fingerprint;
    obj["predicted"] = codes_json(p.predicted);
    auto& dropped = obj["dropped"] = OrderedJson::array();
    for (const auto& d : p.dropped) {
      dropped.push_back(OrderedJson{{"token", d.token}, {"reason", to_string(d.reason)}});
    }
    obj["raw_text"] = p.raw_text;
    out += dump_line(obj);
  }
  return out;
}

std::string serialize_scores(const RunRecord& record) {
  std::string out;
  for (const auto& cell : record.cells) {
    if (!cell.score) continue;
    const auto& s = *cell.score;
    auto obj = key_json(cell.key);
    obj["chapter"] = cell.chapter;
    obj["dataset"] = cell.dataset;
    obj["ground_truth"] = codes_json(cell.ground_truth);
    obj["predicted"] = codes_json(cell.prediction ? cell.prediction->predicted : std::vector<LOCode>{});
    obj["exact_match"] = s.exact_match;
    obj["jaccard"] = s.jaccard;
    obj["precision"] = s.precision;
    obj["recall"] = s.recall;
    obj["f1"] = s.f1;
    obj["distance"] = s.distance;
    obj["distance_mode"] = to_string(s.distance_mode);
    out += dump_line(obj);
  }
  return out;
}

std::string serialize_failures(const RunRecord& record) {
  std::string out;
  for (const auto& cell : record.cells) {
    if (!cell.failure) continue;
    auto obj = key_json(cell.key);
    obj["error"] = to_string(cell.failure->code);
    obj["message"] = cell.failure->message;
    out += dump_line(obj);
  }
  return out;
}

void write_scores(const RunRecord& record, const std::filesystem::path& dir) {
  detail::write_file_atomic(dir / kScoresFile, serialize_scores(record));
}

void write_run(const RunRecord& record, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  detail::write_file_atomic(dir / kConfigFile, serialize_experiment_config(record.config));
  detail::write_file_atomic(dir / kPredictionsFile, serialize_predictions(record));
  write_scores(record, dir);
  detail::write_file_atomic(dir / kFailuresFile, serialize_failures(record));

  OrderedJson meta;
  meta["started_at"] = record.started_at;
  meta["finished_at"] = record.finished_at;
  meta["cells"] = record.cells.size();
  meta["scored"] = record.scored_count();
  meta["failed"] = record.failed_count();
  auto& latencies = meta["latency_ms"] = OrderedJson::array();
  for (const auto& cell : record.cells) {
    if (!cell.prediction) continue;
    auto entry = key_json(cell.key);
    entry["latency_ms"] = cell.prediction->latency.count();
    latencies.push_back(std::move(entry));
  }
  detail::write_file_atomic(dir / kMetaFile, meta.dump(2) + "\n");
}

RunRecord load_run(const std::filesystem::path& dir) {
  RunRecord record;
  record.config = parse_experiment_config(detail::read_file(dir / kConfigFile),
                                          std::filesystem::absolute(dir));
  const auto taxonomy = load_taxonomy(record.config.taxonomy_path);
  const auto corpus = load_corpus(record.config.corpus_path, taxonomy, CorpusMode::Labeled);

  std::map<std::string, const Question*, std::less<>> questions;
  for (const auto& q : corpus.questions()) questions.emplace(q.id, &q);

  auto make_cell = [&](const CellKey& key) {
    auto it = questions.find(key.question_id);
    if (it == questions.end()) {
      throw Error(ErrorCode::NotFound, "question '" + key.question_id + "' is not in the corpus");
    }
    CellOutcome cell;
    cell.key = key;
    cell.chapter = it->second->chapter;
    cell.dataset = it->second->dataset;
    cell.ground_truth = it->second->ground_truth;
    return cell;
  };

  try {
    for_each_line(detail::read_file(dir / kPredictionsFile), [&](std::string_view line) {
      const auto obj = detail::parse_json(line, kPredictionsFile);
      auto cell = make_cell(key_from_json(obj));
      PredictionRecord p;
      p.key = cell.key;
      p.fingerprint = obj.value("fingerprint", "");
      p.raw_text = obj.value("raw_text", "");
      p.predicted = codes_from_json(obj.at("predicted"));
      for (const auto& d : obj.value("dropped", Json::array())) {
        p.dropped.push_back({d.at("token").get<std::string>(),
                             parse_drop_reason(d.at("reason").get<std::string>())});
      }
      cell.prediction = std::move(p);
      record.cells.push_back(std::move(cell));
    });
    if (std::filesystem::exists(dir / kFailuresFile)) {
      for_each_line(detail::read_file(dir / kFailuresFile), [&](std::string_view line) {
        const auto obj = detail::parse_json(line, kFailuresFile);
        auto cell = make_cell(key_from_json(obj));
        CellFailure failure;
        failure.message = obj.value("message", "");
        const auto name = obj.value("error", "");
        for (int c = 0; c <= static_cast<int>(ErrorCode::IoError); ++c) {
          if (to_string(static_cast<ErrorCode>(c)) == name) failure.code = static_cast<ErrorCode>(c);
        }
        cell.failure = std::move(failure);
        record.cells.push_back(std::move(cell));
      });
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, dir.string() + ": " + e.what());
  }
  std::sort(record.cells.begin(), record.cells.end(),
            [](const CellOutcome& a, const CellOutcome& b) { return a.key < b.key; });

  if (std::filesystem::exists(dir / kMetaFile)) {
    const auto meta = detail::parse_json(detail::read_file(dir / kMetaFile), kMetaFile);
    record.started_at = meta.value("started_at", "");
    record.finished_at = meta.value("finished_at", "");
  }
  rescore(record, taxonomy, record.config.distance_mode);
  return record;
}

}  // namespace atomiclo
