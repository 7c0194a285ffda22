#include <algorithm>
#include <cctype>

#include "atomiclo/llm_gateway.hpp"
#include "json_io.hpp"

namespace atomiclo {

namespace {

bool is_token_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

bool is_separator(char c) { return c == '-' || c == '_'; }

// A token is code-shaped when it has three separator-delimited parts: letters,
// then letters/digits, then digits. Case and separator style are not checked
// here; the strict grammar decides whether a code-shaped token is malformed.
bool looks_like_code(std::string_view token) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= token.size(); ++i) {
    if (i == token.size() || is_separator(token[i])) {
      parts.push_back(token.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() != 3) return false;
  if (std::any_of(parts.begin(), parts.end(), [](auto p) { return p.empty(); })) return false;
  auto all = [](std::string_view s, auto pred) {
    return std::all_of(s.begin(), s.end(), [&](char c) { return pred(static_cast<unsigned char>(c)); });
  };
  return all(parts[0], [](unsigned char c) { return std::isalpha(c) != 0; }) &&
         all(parts[1], [](unsigned char c) { return std::isalnum(c) != 0; }) &&
         all(parts[2], [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

std::string_view to_string(DropReason reason) noexcept {
  return reason == DropReason::NotInSubset ? "not-in-subset" : "malformed";
}

DropReason parse_drop_reason(std::string_view text) {
  if (text == "not-in-subset") return DropReason::NotInSubset;
  if (text == "malformed") return DropReason::Malformed;
  throw Error(ErrorCode::ParseError, "unknown drop reason '" + std::string(text) + "'");
}

ParsedPrediction parse_prediction(std::string_view raw_text, const std::set<LOCode>& allowed) {
  ParsedPrediction result;
  std::set<LOCode> kept;
  std::size_t i = 0;
  while (i < raw_text.size()) {
    if (!is_token_char(raw_text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < raw_text.size() && is_token_char(raw_text[end])) ++end;
    auto token = raw_text.substr(i, end - i);
    i = end;

    while (!token.empty() && is_separator(token.front())) token.remove_prefix(1);
    while (!token.empty() && is_separator(token.back())) token.remove_suffix(1);
    if (!looks_like_code(token)) continue;

    auto code = try_parse_lo_code(token);
    if (!code) {
      result.dropped.push_back({std::string(token), DropReason::Malformed});
    } else if (!allowed.contains(*code)) {
      result.dropped.push_back({std::string(token), DropReason::NotInSubset});
    } else if (kept.insert(*code).second) {
      result.predicted.push_back(*std::move(code));
    }
  }
  return result;
}

}  // namespace atomiclo
