#pragma once

// Internal helpers shared by the loaders. Not installed.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "atomiclo/error.hpp"

namespace atomiclo::detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

Json parse_json(std::string_view text, std::string_view what);

/// Required nonempty string member. Throws Error{MissingField}.
std::string required_string(const Json& object, std::string_view key, std::string_view context);

/// Current wall-clock time as ISO-8601 UTC, second precision.
std::string utc_now();

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

}  // namespace atomiclo::detail
