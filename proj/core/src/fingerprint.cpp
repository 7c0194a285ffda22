#include <array>
#include <cstdio>

#include <openssl/evp.h>

#include "atomiclo/llm_gateway.hpp"
#include "json_io.hpp"

namespace atomiclo {

namespace {

// JSON string literal. Bytes outside the mandatory escapes pass through
// unchanged, so distinct inputs always give distinct renderings.
void append_json_string(std::string& out, std::string_view text) {
  out.push_back('"');
  for (unsigned char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
}

std::string json_number(double value) { return detail::Json(value).dump(); }

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0x0f]);
  }
  return hex;
}

std::string request_fingerprint(const ModelConfig& cfg, std::string_view prompt, int sample) {
  // Keys in sorted order: model, prompt, sample, temperature, top_p.
  std::string canonical = "{\"model\":";
  append_json_string(canonical, cfg.model_name);
  canonical += ",\"prompt\":";
  append_json_string(canonical, prompt);
  if (sample != 0) {
    canonical += ",\"sample\":" + std::to_string(sample);
  }
  canonical += ",\"temperature\":" + json_number(cfg.temperature);
  canonical += ",\"top_p\":" + json_number(cfg.top_p);
  canonical += "}";
  return sha256_hex(canonical);
}

}  // namespace atomiclo
