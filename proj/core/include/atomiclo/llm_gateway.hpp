#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "atomiclo/error.hpp"
#include "atomiclo/taxonomy.hpp"

namespace atomiclo {

struct ModelConfig {
  std::string model_name;
  std::string endpoint_url;
  std::string api_key_env;  // name of the environment variable holding the key
  double temperature = 0.9;
  double top_p = 1.0;
  int max_retries = 3;  // total attempts per request, at least one is made
  std::chrono::milliseconds timeout{60000};
  std::chrono::milliseconds backoff_base{500};

  /// Throws Error{ConfigInvalid} unless 0 <= temperature <= 2, 0 < top_p <= 1,
  /// max_retries >= 0 and model_name is nonempty.
  void validate() const;
};

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// Digest of the key-sorted compact JSON object {model, prompt, temperature,
/// top_p}. A nonzero `sample` adds a "sample" member so repeated draws of the
/// same prompt get distinct cassette entries.
std::string request_fingerprint(const ModelConfig& cfg, std::string_view prompt, int sample = 0);

/// Request body for a chat-completions endpoint: model, temperature, top_p
/// and a single user message carrying the prompt.
std::string build_chat_request_body(const ModelConfig& cfg, std::string_view prompt);

/// Content of `choices[0].message.content`. Throws Error{MalformedResponse}.
std::string extract_reply(std::string_view response_body);

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::chrono::milliseconds timeout{60000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Blocking POST. Implementations throw Error{NetworkError} when no HTTP
/// response could be obtained.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport (http:// and https://).
std::shared_ptr<Transport> make_http_transport();

/// Fingerprint -> reply map persisted as pretty-printed JSON with sorted keys.
/// All members are safe to call concurrently; writes are serialized.
class Cassette {
 public:
  Cassette() = default;
  /// In-memory cassette bound to `path`; loads it when the file exists.
  explicit Cassette(std::filesystem::path path);

  std::optional<std::string> lookup(std::string_view fingerprint) const;
  /// Inserts (or overwrites) and, when bound to a file, saves atomically.
  void record(const std::string& fingerprint, const std::string& reply);
  void save() const;

  std::size_t size() const;
  std::map<std::string, std::string> entries() const;
  const std::filesystem::path& path() const noexcept { return path_; }

  static std::string serialize(const std::map<std::string, std::string>& entries);

 private:
  void save_locked() const;

  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string, std::less<>> entries_;
};

enum class BackendMode { Live, Record, Replay };
std::string_view to_string(BackendMode mode) noexcept;
BackendMode parse_backend_mode(std::string_view text);

/// Sends prompts to a chat-completions backend, or serves them from a
/// cassette. Replay never touches the transport.
class ChatClient {
 public:
  using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  ChatClient(BackendMode mode, std::shared_ptr<Transport> transport,
             std::shared_ptr<Cassette> cassette, std::size_t max_in_flight = 8);

  /// Overrides for tests; defaults read the process environment and sleep.
  void set_env_lookup(EnvLookup lookup) { env_ = std::move(lookup); }
  void set_sleeper(Sleeper sleeper) { sleep_ = std::move(sleeper); }

  /// Raw reply text. Errors: NetworkError (after retries), AuthError,
  /// CassetteMiss (replay), MalformedResponse.
  std::string complete(std::string_view prompt, const ModelConfig& cfg, int sample = 0);

  BackendMode mode() const noexcept { return mode_; }

 private:
  std::string call_endpoint(std::string_view prompt, const ModelConfig& cfg);

  BackendMode mode_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<Cassette> cassette_;
  EnvLookup env_;
  Sleeper sleep_;

  std::mutex gate_mutex_;
  std::condition_variable gate_cv_;
  std::size_t in_flight_ = 0;
  std::size_t max_in_flight_;
};

enum class DropReason { NotInSubset, Malformed };
std::string_view to_string(DropReason reason) noexcept;
DropReason parse_drop_reason(std::string_view text);

struct DroppedToken {
  std::string token;
  DropReason reason = DropReason::Malformed;

  friend bool operator==(const DroppedToken&, const DroppedToken&) = default;
};

struct ParsedPrediction {
  std::vector<LOCode> predicted;  // first-occurrence order, no duplicates
  std::vector<DroppedToken> dropped;
};

/// Lexical extraction of LO codes from free-form model output. Every
/// code-shaped token is either kept (valid and in `allowed`) or dropped with
/// a reason, so the result is always a subset of `allowed`.
ParsedPrediction parse_prediction(std::string_view raw_text, const std::set<LOCode>& allowed);

}  // namespace atomiclo
