#include <cstdlib>
#include <thread>

#include "atomiclo/llm_gateway.hpp"
#include "json_io.hpp"

namespace atomiclo {

namespace {

bool is_transient_status(int status) { return status == 429 || (status >= 500 && status <= 599); }

// RAII slot in the client's in-flight bound.
class InFlightSlot {
 public:
  InFlightSlot(std::mutex& m, std::condition_variable& cv, std::size_t& count, std::size_t limit)
      : mutex_(m), cv_(cv), count_(count) {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return count_ < limit; });
    ++count_;
  }
  ~InFlightSlot() {
    {
      std::lock_guard lock(mutex_);
      --count_;
    }
    cv_.notify_one();
  }
  InFlightSlot(const InFlightSlot&) = delete;
  InFlightSlot& operator=(const InFlightSlot&) = delete;

 private:
  std::mutex& mutex_;
  std::condition_variable& cv_;
  std::size_t& count_;
};

}  // namespace

void ModelConfig::validate() const {
  if (model_name.empty()) throw Error(ErrorCode::ConfigInvalid, "model_name is empty");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorCode::ConfigInvalid, model_name + ": temperature must be in [0, 2]");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, model_name + ": top_p must be in (0, 1]");
  }
  if (max_retries < 0) throw Error(ErrorCode::ConfigInvalid, model_name + ": max_retries < 0");
  if (timeout.count() <= 0) throw Error(ErrorCode::ConfigInvalid, model_name + ": timeout <= 0");
}

std::string build_chat_request_body(const ModelConfig& cfg, std::string_view prompt) {
  detail::OrderedJson body;
  body["model"] = cfg.model_name;
  body["temperature"] = cfg.temperature;
  body["top_p"] = cfg.top_p;
  body["messages"] = detail::OrderedJson::array(
      {detail::OrderedJson{{"role", "user"}, {"content", std::string(prompt)}}});
  return body.dump(-1, ' ', false, detail::OrderedJson::error_handler_t::replace);
}

std::string extract_reply(std::string_view response_body) {
  detail::Json doc;
  try {
    doc = detail::Json::parse(response_body.begin(), response_body.end());
  } catch (const detail::Json::parse_error& e) {
    throw Error(ErrorCode::MalformedResponse, std::string("response is not JSON: ") + e.what());
  }
  const auto* content = [&]() -> const detail::Json* {
    if (!doc.is_object()) return nullptr;
    auto choices = doc.find("choices");
    if (choices == doc.end() || !choices->is_array() || choices->empty()) return nullptr;
    const auto& first = (*choices)[0];
    if (!first.is_object()) return nullptr;
    auto message = first.find("message");
    if (message == first.end() || !message->is_object()) return nullptr;
    auto text = message->find("content");
    if (text == message->end() || !text->is_string()) return nullptr;
    return &*text;
  }();
  if (!content) {
    throw Error(ErrorCode::MalformedResponse, "missing choices[0].message.content");
  }
  return content->get<std::string>();
}

std::string_view to_string(BackendMode mode) noexcept {
  switch (mode) {
    case BackendMode::Live: return "live";
    case BackendMode::Record: return "record";
    case BackendMode::Replay: return "replay";
  }
  return "";
}

BackendMode parse_backend_mode(std::string_view text) {
  const auto key = detail::to_lower(detail::trim(text));
  if (key == "live") return BackendMode::Live;
  if (key == "record") return BackendMode::Record;
  if (key == "replay") return BackendMode::Replay;
  throw Error(ErrorCode::ConfigInvalid, "unknown backend mode '" + std::string(text) + "'");
}

ChatClient::ChatClient(BackendMode mode, std::shared_ptr<Transport> transport,
                       std::shared_ptr<Cassette> cassette, std::size_t max_in_flight)
    : mode_(mode),
      transport_(std::move(transport)),
      cassette_(std::move(cassette)),
      env_([](const std::string& name) -> std::optional<std::string> {
        if (const char* value = std::getenv(name.c_str())) return std::string(value);
        return std::nullopt;
      }),
      sleep_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }),
      max_in_flight_(max_in_flight == 0 ? 1 : max_in_flight) {
  if (mode_ != BackendMode::Live && !cassette_) {
    throw Error(ErrorCode::ConfigInvalid, "record and replay modes need a cassette");
  }
  if (mode_ != BackendMode::Replay && !transport_) {
    throw Error(ErrorCode::ConfigInvalid, "live and record modes need a transport");
  }
}

std::string ChatClient::complete(std::string_view prompt, const ModelConfig& cfg, int sample) {
  const auto fingerprint = request_fingerprint(cfg, prompt, sample);
  if (mode_ == BackendMode::Replay) {
    if (auto reply = cassette_->lookup(fingerprint)) return *std::move(reply);
    throw Error(ErrorCode::CassetteMiss, fingerprint);
  }

  std::string reply;
  {
    InFlightSlot slot(gate_mutex_, gate_cv_, in_flight_, max_in_flight_);
    reply = call_endpoint(prompt, cfg);
  }
  if (mode_ == BackendMode::Record) cassette_->record(fingerprint, reply);
  return reply;
}

std::string ChatClient::call_endpoint(std::string_view prompt, const ModelConfig& cfg) {
  HttpRequest request;
  request.url = cfg.endpoint_url;
  request.timeout = cfg.timeout;
  request.body = build_chat_request_body(cfg, prompt);
  request.headers.emplace_back("Content-Type", "application/json");
  if (!cfg.api_key_env.empty()) {
    auto key = env_(cfg.api_key_env);
    if (!key || key->empty()) {
      throw Error(ErrorCode::AuthError, "environment variable " + cfg.api_key_env + " is not set");
    }
    request.headers.emplace_back("Authorization", "Bearer " + *key);
  }

  const int attempts = cfg.max_retries < 1 ? 1 : cfg.max_retries;
  std::string last_failure;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) sleep_(cfg.backoff_base * (1LL << (attempt - 2)));
    HttpResponse response;
    try {
      response = transport_->post(request);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NetworkError) throw;
      last_failure = e.what();
      continue;
    }
    if (response.status == 401 || response.status == 403) {
      throw Error(ErrorCode::AuthError, cfg.endpoint_url + " returned " + std::to_string(response.status));
    }
    if (is_transient_status(response.status)) {
      last_failure = "HTTP " + std::to_string(response.status);
      continue;
    }
    if (response.status < 200 || response.status > 299) {
      throw Error(ErrorCode::MalformedResponse,
                  cfg.endpoint_url + " returned HTTP " + std::to_string(response.status));
    }
    return extract_reply(response.body);
  }
  throw Error(ErrorCode::NetworkError, cfg.endpoint_url + " failed after " +
                                           std::to_string(attempts) + " attempt(s): " + last_failure);
}

}  // namespace atomiclo
