#include "atomiclo/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "json_io.hpp"

namespace atomiclo {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Returns the canonical key used for lenient enum parsing: lowercase with
// whitespace, periods, underscores and hyphens removed.
std::string enum_key(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return key;
}

bool contains_ci(std::string_view haystack, std::string_view needle_lower) {
  if (needle_lower.empty()) return true;
  return detail::to_lower(haystack).find(needle_lower) != std::string::npos;
}

}  // namespace

std::string LOCode::str() const {
  return topic + "-" + term + "-" + std::to_string(index);
}

std::optional<LOCode> try_parse_lo_code(std::string_view text) noexcept {
  auto first = text.find('-');
  if (first == std::string_view::npos) return std::nullopt;
  auto second = text.find('-', first + 1);
  if (second == std::string_view::npos) return std::nullopt;
  auto topic = text.substr(0, first);
  auto term = text.substr(first + 1, second - first - 1);
  auto digits = text.substr(second + 1);

  if (topic.empty() || !std::all_of(topic.begin(), topic.end(), is_upper)) return std::nullopt;
  if (term.empty() ||
      !std::all_of(term.begin(), term.end(), [](char c) { return is_upper(c) || is_digit(c); })) {
    return std::nullopt;
  }
  // Nine digits keeps the value inside uint32 without overflow checks.
  if (digits.empty() || digits.size() > 9 || digits.front() == '0' ||
      !std::all_of(digits.begin(), digits.end(), is_digit)) {
    return std::nullopt;
  }
  std::uint32_t index = 0;
  for (char c : digits) index = index * 10 + static_cast<std::uint32_t>(c - '0');
  try {
    return LOCode{std::string(topic), std::string(term), index};
  } catch (...) {
    return std::nullopt;
  }
}

LOCode parse_lo_code(std::string_view text) {
  if (auto code = try_parse_lo_code(text)) return *std::move(code);
  throw Error(ErrorCode::InvalidCodeFormat, "'" + std::string(text) + "'");
}

std::string_view to_string(ActionType action) noexcept {
  switch (action) {
    case ActionType::ConcID: return "Conc.ID";
    case ActionType::ConcProp: return "Conc.Prop";
    case ActionType::ProcApp: return "Proc.App";
    case ActionType::RepMap: return "Rep.Map";
  }
  return "";
}

std::string_view to_string(LOCategory category) noexcept {
  switch (category) {
    case LOCategory::PhysicsLaws: return "Physics Laws";
    case LOCategory::Representations: return "Representations";
    case LOCategory::SpecialCases: return "Special Cases";
  }
  return "";
}

ActionType parse_action(std::string_view text) {
  const auto key = enum_key(text);
  if (key == "concid" || key == "conceptidentification") return ActionType::ConcID;
  if (key == "concprop" || key == "conceptproperty") return ActionType::ConcProp;
  if (key == "procapp" || key == "procedureapplication") return ActionType::ProcApp;
  if (key == "repmap" || key == "representationmapping") return ActionType::RepMap;
  throw Error(ErrorCode::UnknownAction, "'" + std::string(text) + "'");
}

LOCategory parse_category(std::string_view text) {
  auto key = enum_key(text);
  if (!key.empty() && key.back() == 's') key.pop_back();
  if (key == "physicslaw" || key == "physic") return LOCategory::PhysicsLaws;
  if (key == "representation") return LOCategory::Representations;
  if (key == "specialcase") return LOCategory::SpecialCases;
  throw Error(ErrorCode::UnknownCategory, "'" + std::string(text) + "'");
}

std::string normalize_name(std::string_view name) {
  std::string out;
  bool pending_space = false;
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

Taxonomy Taxonomy::from_objectives(std::vector<LearningObjective> los) {
  Taxonomy t;
  std::map<std::string, std::pair<std::string, LOCategory>> name_owner;
  for (std::size_t i = 0; i < los.size(); ++i) {
    auto& lo = los[i];
    const auto code = lo.code.str();
    lo.name = normalize_name(lo.name);
    const std::pair<std::string_view, const std::string*> fields[] = {
        {"name", &lo.name},         {"item", &lo.item},       {"provided", &lo.provided},
        {"outcome", &lo.outcome},   {"chapter", &lo.chapter}};
    for (const auto& [field, value] : fields) {
      if (detail::trim(*value).empty()) {
        throw Error(ErrorCode::MissingField, code + ": empty field '" + std::string(field) + "'");
      }
    }
    if (!t.by_code_.emplace(lo.code, i).second) {
      throw Error(ErrorCode::DuplicateCode, code);
    }
    auto [owner, inserted] = name_owner.try_emplace(lo.name, lo.chapter, lo.category);
    if (!inserted && (owner->second.first != lo.chapter || owner->second.second != lo.category)) {
      throw Error(ErrorCode::InconsistentName,
                  code + ": name '" + lo.name + "' already used with a different chapter or category");
    }
    auto& chapter_list = t.by_chapter_[lo.chapter];
    if (chapter_list.empty()) t.chapters_.push_back(lo.chapter);
    chapter_list.push_back(i);
  }
  t.los_ = std::move(los);
  return t;
}

const LearningObjective* Taxonomy::find(const LOCode& code) const noexcept {
  auto it = by_code_.find(code);
  return it == by_code_.end() ? nullptr : &los_[it->second];
}

const LearningObjective& Taxonomy::at(const LOCode& code) const {
  if (const auto* lo = find(code)) return *lo;
  throw Error(ErrorCode::UnresolvedCode, code.str());
}

std::size_t Taxonomy::position(const LOCode& code) const {
  auto it = by_code_.find(code);
  if (it == by_code_.end()) throw Error(ErrorCode::UnresolvedCode, code.str());
  return it->second;
}

bool Taxonomy::has_chapter(std::string_view chapter) const noexcept {
  return by_chapter_.find(chapter) != by_chapter_.end();
}

std::vector<LearningObjective> Taxonomy::subset_by_chapter(std::string_view chapter) const {
  auto it = by_chapter_.find(chapter);
  if (it == by_chapter_.end()) {
    throw Error(ErrorCode::UnknownChapter, "'" + std::string(chapter) + "'");
  }
  std::vector<LearningObjective> out;
  out.reserve(it->second.size());
  for (auto i : it->second) out.push_back(los_[i]);
  return out;
}

Taxonomy parse_taxonomy(std::string_view json_text) {
  const auto doc = detail::parse_json(json_text, "taxonomy");
  if (!doc.is_array()) {
    throw Error(ErrorCode::ParseError, "taxonomy: top-level value must be an array");
  }
  std::vector<LearningObjective> los;
  los.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& entry = doc[i];
    const auto context = "taxonomy entry " + std::to_string(i);
    if (!entry.is_object()) throw Error(ErrorCode::ParseError, context + ": not an object");
    LearningObjective lo;
    lo.code = parse_lo_code(detail::required_string(entry, "code", context));
    const auto where = context + " (" + lo.code.str() + ")";
    lo.name = detail::required_string(entry, "name", where);
    lo.item = detail::required_string(entry, "item", where);
    lo.action = parse_action(detail::required_string(entry, "action", where));
    lo.provided = detail::required_string(entry, "provided", where);
    lo.outcome = detail::required_string(entry, "outcome", where);
    lo.category = parse_category(detail::required_string(entry, "category", where));
    lo.chapter = detail::required_string(entry, "chapter", where);
    los.push_back(std::move(lo));
  }
  return Taxonomy::from_objectives(std::move(los));
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  return parse_taxonomy(detail::read_file(path));
}

std::string serialize_taxonomy(const Taxonomy& taxonomy) {
  auto doc = detail::OrderedJson::array();
  for (const auto& lo : taxonomy.objectives()) {
    detail::OrderedJson entry;
    entry["code"] = lo.code.str();
    entry["name"] = lo.name;
    entry["item"] = lo.item;
    entry["action"] = to_string(lo.action);
    entry["provided"] = lo.provided;
    entry["outcome"] = lo.outcome;
    entry["category"] = to_string(lo.category);
    entry["chapter"] = lo.chapter;
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

Manifest parse_manifest(std::string_view json_text) {
  const auto doc = detail::parse_json(json_text, "manifest");
  if (!doc.is_object()) {
    throw Error(ErrorCode::ParseError, "manifest: top-level value must be an object");
  }
  auto count = [](const detail::Json& v, const std::string& where) -> long {
    if (!v.is_number_integer() || v.get<long>() < 0) {
      throw Error(ErrorCode::ParseError, where + ": expected a non-negative integer");
    }
    return v.get<long>();
  };
  Manifest manifest;
  for (const auto& [chapter, spec] : doc.items()) {
    if (!spec.is_object()) throw Error(ErrorCode::ParseError, "manifest '" + chapter + "': not an object");
    ChapterCounts counts;
    if (spec.contains("codes")) counts.codes = count(spec["codes"], chapter + ".codes");
    if (spec.contains("names")) counts.names = count(spec["names"], chapter + ".names");
    if (spec.contains("actions")) {
      for (const auto& [key, v] : spec["actions"].items()) {
        counts.actions[parse_action(key)] = count(v, chapter + ".actions." + key);
      }
    }
    if (spec.contains("categories")) {
      for (const auto& [key, v] : spec["categories"].items()) {
        counts.categories[parse_category(key)] = count(v, chapter + ".categories." + key);
      }
    }
    manifest.emplace(chapter, std::move(counts));
  }
  return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(detail::read_file(path));
}

std::string serialize_manifest(const Manifest& manifest) {
  detail::OrderedJson doc = detail::OrderedJson::object();
  for (const auto& [chapter, counts] : manifest) {
    detail::OrderedJson entry = detail::OrderedJson::object();
    if (counts.codes) entry["codes"] = *counts.codes;
    if (counts.names) entry["names"] = *counts.names;
    if (!counts.actions.empty()) {
      auto& actions = entry["actions"] = detail::OrderedJson::object();
      for (const auto& [action, n] : counts.actions) actions[std::string(to_string(action))] = n;
    }
    if (!counts.categories.empty()) {
      auto& cats = entry["categories"] = detail::OrderedJson::object();
      for (const auto& [cat, n] : counts.categories) cats[std::string(to_string(cat))] = n;
    }
    doc[chapter] = std::move(entry);
  }
  return doc.dump(2) + "\n";
}

Manifest manifest_of(const Taxonomy& taxonomy) {
  Manifest manifest;
  for (const auto& chapter : taxonomy.chapters()) {
    ChapterCounts counts;
    counts.codes = 0;
    for (auto a : kAllActions) counts.actions[a] = 0;
    for (auto c : kAllCategories) counts.categories[c] = 0;
    std::set<std::string> names;
    for (const auto& lo : taxonomy.subset_by_chapter(chapter)) {
      ++*counts.codes;
      ++counts.actions[lo.action];
      if (names.insert(lo.name).second) ++counts.categories[lo.category];
    }
    counts.names = static_cast<long>(names.size());
    manifest.emplace(chapter, std::move(counts));
  }
  return manifest;
}

std::vector<ManifestMismatch> validate_against_manifest(const Taxonomy& taxonomy,
                                                        const Manifest& manifest) {
  const auto actual = manifest_of(taxonomy);
  const ChapterCounts empty_chapter = [] {
    ChapterCounts c;
    c.codes = 0;
    c.names = 0;
    return c;
  }();

  std::vector<ManifestMismatch> report;
  for (const auto& [chapter, expected] : manifest) {
    auto it = actual.find(chapter);
    const auto& got = it == actual.end() ? empty_chapter : it->second;
    auto check = [&](std::string field, long want, long have) {
      if (want != have) report.push_back({chapter, std::move(field), want, have});
    };
    if (expected.codes) check("codes", *expected.codes, got.codes.value_or(0));
    if (expected.names) check("names", *expected.names, got.names.value_or(0));
    for (const auto& [action, want] : expected.actions) {
      auto have = got.actions.find(action);
      check("action:" + std::string(to_string(action)), want,
            have == got.actions.end() ? 0 : have->second);
    }
    for (const auto& [category, want] : expected.categories) {
      auto have = got.categories.find(category);
      check("category:" + std::string(to_string(category)), want,
            have == got.categories.end() ? 0 : have->second);
    }
  }
  return report;
}

std::vector<LearningObjective> search_los(const Taxonomy& taxonomy, std::string_view query,
                                          const SearchFilters& filters) {
  const auto needle = detail::to_lower(detail::trim(query));
  struct Hit {
    bool exact_code;
    bool name_match;
    bool item_match;
    std::size_t position;
  };
  std::vector<Hit> hits;
  const auto los = taxonomy.objectives();
  for (std::size_t i = 0; i < los.size(); ++i) {
    const auto& lo = los[i];
    if (filters.chapter && lo.chapter != *filters.chapter) continue;
    if (filters.category && lo.category != *filters.category) continue;
    if (filters.action && lo.action != *filters.action) continue;
    const auto code = lo.code.str();
    const bool exact = !needle.empty() && detail::to_lower(code) == needle;
    const bool code_match = contains_ci(code, needle);
    const bool name_match = !needle.empty() && contains_ci(lo.name, needle);
    const bool item_match = !needle.empty() && contains_ci(lo.item, needle);
    if (!code_match && !name_match && !item_match) continue;
    hits.push_back({exact, name_match, item_match, i});
  }
  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return std::tuple(!a.exact_code, !a.name_match, !a.item_match, a.position) <
           std::tuple(!b.exact_code, !b.name_match, !b.item_match, b.position);
  });
  std::vector<LearningObjective> out;
  out.reserve(hits.size());
  for (const auto& hit : hits) out.push_back(los[hit.position]);
  return out;
}

}  // namespace atomiclo
