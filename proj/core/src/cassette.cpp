#include <filesystem>

#include "atomiclo/llm_gateway.hpp"
#include "json_io.hpp"

namespace atomiclo {

Cassette::Cassette(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  const auto doc = detail::parse_json(detail::read_file(path_), "cassette " + path_.string());
  if (!doc.is_object()) {
    throw Error(ErrorCode::ParseError, "cassette " + path_.string() + ": expected an object");
  }
  for (const auto& [fp, reply] : doc.items()) {
    if (!reply.is_string()) {
      throw Error(ErrorCode::ParseError, "cassette entry " + fp + ": reply must be a string");
    }
    entries_.emplace(fp, reply.get<std::string>());
  }
}

std::optional<std::string> Cassette::lookup(std::string_view fingerprint) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(fingerprint);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void Cassette::record(const std::string& fingerprint, const std::string& reply) {
  std::lock_guard lock(mutex_);
  entries_[fingerprint] = reply;
  if (!path_.empty()) save_locked();
}

void Cassette::save() const {
  std::lock_guard lock(mutex_);
  save_locked();
}

void Cassette::save_locked() const {
  if (path_.empty()) return;
  detail::write_file_atomic(path_, serialize({entries_.begin(), entries_.end()}));
}

std::size_t Cassette::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::map<std::string, std::string> Cassette::entries() const {
  std::lock_guard lock(mutex_);
  return {entries_.begin(), entries_.end()};
}

std::string Cassette::serialize(const std::map<std::string, std::string>& entries) {
  detail::Json doc = detail::Json::object();
  for (const auto& [fp, reply] : entries) doc[fp] = reply;
  return doc.dump(2, ' ', false, detail::Json::error_handler_t::replace) + "\n";
}

}  // namespace atomiclo
