#include "atomiclo/experiment.hpp"

#include <algorithm>
#include <set>

#include "json_io.hpp"

namespace atomiclo {

namespace {

using detail::Json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

template <typename T>
T member_or(const Json& obj, std::string_view key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, "field '" + std::string(key) + "': " + e.what());
  }
}

ModelConfig parse_model(const Json& obj) {
  if (!obj.is_object()) throw Error(ErrorCode::ConfigInvalid, "model entry must be an object");
  ModelConfig m;
  m.model_name = member_or<std::string>(obj, "model_name", "");
  m.endpoint_url = member_or<std::string>(obj, "endpoint_url", "");
  m.api_key_env = member_or<std::string>(obj, "api_key_env", "");
  m.temperature = member_or<double>(obj, "temperature", m.temperature);
  m.top_p = member_or<double>(obj, "top_p", m.top_p);
  m.max_retries = member_or<int>(obj, "max_retries", m.max_retries);
  m.timeout = std::chrono::milliseconds(member_or<long long>(obj, "timeout_ms", m.timeout.count()));
  m.backoff_base =
      std::chrono::milliseconds(member_or<long long>(obj, "backoff_ms", m.backoff_base.count()));
  return m;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (taxonomy_path.empty()) throw Error(ErrorCode::ConfigInvalid, "taxonomy path is required");
  if (corpus_path.empty()) throw Error(ErrorCode::ConfigInvalid, "corpus path is required");
  if (models.empty()) throw Error(ErrorCode::ConfigInvalid, "at least one model is required");
  if (strategies.empty()) throw Error(ErrorCode::ConfigInvalid, "at least one strategy is required");
  if (formats.empty()) throw Error(ErrorCode::ConfigInvalid, "at least one format is required");
  if (parallelism < 1) throw Error(ErrorCode::ConfigInvalid, "parallelism must be >= 1");
  if (samples_per_cell < 1) throw Error(ErrorCode::ConfigInvalid, "samples_per_cell must be >= 1");
  if (backend != BackendMode::Live && cassette_path.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "record and replay backends need a cassette path");
  }
  std::set<std::string> names;
  for (const auto& m : models) {
    m.validate();
    if (!names.insert(m.model_name).second) {
      throw Error(ErrorCode::ConfigInvalid, "duplicate model '" + m.model_name + "'");
    }
    if (backend != BackendMode::Replay && m.endpoint_url.empty()) {
      throw Error(ErrorCode::ConfigInvalid, m.model_name + ": endpoint_url is required");
    }
  }
  auto unique = [](auto values) {
    std::sort(values.begin(), values.end());
    return std::adjacent_find(values.begin(), values.end()) == values.end();
  };
  if (!unique(strategies)) throw Error(ErrorCode::ConfigInvalid, "duplicate strategy");
  if (!unique(formats)) throw Error(ErrorCode::ConfigInvalid, "duplicate format");
}

const ModelConfig* ExperimentConfig::find_model(std::string_view name) const noexcept {
  auto it = std::find_if(models.begin(), models.end(),
                         [&](const ModelConfig& m) { return m.model_name == name; });
  return it == models.end() ? nullptr : &*it;
}

ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = detail::parse_json(json_text, "experiment config");
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ConfigInvalid, "config must be a JSON object");

  ExperimentConfig cfg;
  cfg.taxonomy_path = resolve(base_dir, member_or<std::string>(doc, "taxonomy", ""));
  cfg.corpus_path = resolve(base_dir, member_or<std::string>(doc, "corpus", ""));
  cfg.cassette_path = resolve(base_dir, member_or<std::string>(doc, "cassette", ""));
  cfg.output_dir = resolve(base_dir, member_or<std::string>(doc, "output_dir", ""));
  cfg.backend = parse_backend_mode(member_or<std::string>(doc, "backend", "replay"));
  cfg.parallelism = member_or<int>(doc, "parallelism", 1);
  cfg.distance_mode = parse_distance_mode(member_or<std::string>(doc, "distance_mode", "PairwiseMin"));
  cfg.samples_per_cell = member_or<int>(doc, "samples_per_cell", 1);

  if (auto it = doc.find("models"); it != doc.end() && it->is_array()) {
    for (const auto& m : *it) cfg.models.push_back(parse_model(m));
  }
  for (const auto& s : member_or<std::vector<std::string>>(doc, "strategies", {})) {
    cfg.strategies.push_back(parse_strategy(s));
  }
  for (const auto& f : member_or<std::vector<std::string>>(doc, "formats", {})) {
    cfg.formats.push_back(parse_format(f));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  auto base = std::filesystem::absolute(path).parent_path();
  return parse_experiment_config(detail::read_file(path), base);
}

std::string serialize_experiment_config(const ExperimentConfig& cfg) {
  detail::OrderedJson doc;
  doc["taxonomy"] = cfg.taxonomy_path.string();
  doc["corpus"] = cfg.corpus_path.string();
  auto& models = doc["models"] = detail::OrderedJson::array();
  for (const auto& m : cfg.models) {
    detail::OrderedJson entry;
    entry["model_name"] = m.model_name;
    entry["endpoint_url"] = m.endpoint_url;
    entry["api_key_env"] = m.api_key_env;
    entry["temperature"] = m.temperature;
    entry["top_p"] = m.top_p;
    entry["max_retries"] = m.max_retries;
    entry["timeout_ms"] = m.timeout.count();
    entry["backoff_ms"] = m.backoff_base.count();
    models.push_back(std::move(entry));
  }
  auto& strategies = doc["strategies"] = detail::OrderedJson::array();
  for (auto s : cfg.strategies) strategies.push_back(to_string(s));
  auto& formats = doc["formats"] = detail::OrderedJson::array();
  for (auto f : cfg.formats) formats.push_back(to_string(f));
  doc["backend"] = to_string(cfg.backend);
  doc["cassette"] = cfg.cassette_path.string();
  doc["output_dir"] = cfg.output_dir.string();
  doc["parallelism"] = cfg.parallelism;
  doc["distance_mode"] = to_string(cfg.distance_mode);
  doc["samples_per_cell"] = cfg.samples_per_cell;
  return doc.dump(2) + "\n";
}

}  // namespace atomiclo
