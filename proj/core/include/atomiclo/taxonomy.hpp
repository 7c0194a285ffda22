#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atomiclo/error.hpp"

namespace atomiclo {

/// Identifier of one atomic learning objective, rendered `TOPIC-TERM-INDEX`
/// (e.g. `ME-KE-2`: mechanical-energy topic, kinetic-energy term, index 2).
struct LOCode {
  std::string topic;
  std::string term;
  std::uint32_t index = 0;

  std::string str() const;

  friend auto operator<=>(const LOCode&, const LOCode&) = default;
  friend bool operator==(const LOCode&, const LOCode&) = default;
};

/// Grammar: `[A-Z]+-[A-Z0-9]+-[1-9][0-9]*`. Throws Error{InvalidCodeFormat}.
LOCode parse_lo_code(std::string_view text);
std::optional<LOCode> try_parse_lo_code(std::string_view text) noexcept;

enum class ActionType { ConcID, ConcProp, ProcApp, RepMap };
inline constexpr ActionType kAllActions[] = {ActionType::ConcID, ActionType::ConcProp,
                                             ActionType::ProcApp, ActionType::RepMap};

enum class LOCategory { PhysicsLaws, Representations, SpecialCases };
inline constexpr LOCategory kAllCategories[] = {
    LOCategory::PhysicsLaws, LOCategory::Representations, LOCategory::SpecialCases};

// Canonical forms: "Conc.ID", "Conc.Prop", "Proc.App", "Rep.Map" and
// "Physics Laws", "Representations", "Special Cases". Parsing ignores case,
// whitespace and a trailing plural "s" on categories.
std::string_view to_string(ActionType action) noexcept;
std::string_view to_string(LOCategory category) noexcept;
ActionType parse_action(std::string_view text);
LOCategory parse_category(std::string_view text);

/// Trims and collapses internal whitespace runs to a single space. LO names
/// compare equal iff their normalized forms are byte-equal.
std::string normalize_name(std::string_view name);

struct LearningObjective {
  LOCode code;
  std::string name;  // normalized
  std::string item;
  ActionType action = ActionType::ConcID;
  std::string provided;
  std::string outcome;
  LOCategory category = LOCategory::PhysicsLaws;
  std::string chapter;

  friend bool operator==(const LearningObjective&, const LearningObjective&) = default;
};

/// Immutable, validated collection of learning objectives. File order is the
/// canonical order for every listing the library produces.
class Taxonomy {
 public:
  Taxonomy() = default;

  /// Validates uniqueness of codes, nonempty text fields and name
  /// consistency (one chapter and one category per name).
  static Taxonomy from_objectives(std::vector<LearningObjective> los);

  std::span<const LearningObjective> objectives() const noexcept { return los_; }
  std::size_t size() const noexcept { return los_.size(); }
  bool empty() const noexcept { return los_.empty(); }

  const LearningObjective* find(const LOCode& code) const noexcept;
  /// Throws Error{UnresolvedCode}.
  const LearningObjective& at(const LOCode& code) const;
  /// Position of the code in file order; throws Error{UnresolvedCode}.
  std::size_t position(const LOCode& code) const;

  /// Chapters in order of first appearance.
  const std::vector<std::string>& chapters() const noexcept { return chapters_; }
  bool has_chapter(std::string_view chapter) const noexcept;

  /// All LOs of `chapter` in file order. Throws Error{UnknownChapter}.
  std::vector<LearningObjective> subset_by_chapter(std::string_view chapter) const;

  friend bool operator==(const Taxonomy& a, const Taxonomy& b) { return a.los_ == b.los_; }

 private:
  std::vector<LearningObjective> los_;
  std::map<LOCode, std::size_t> by_code_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_chapter_;
  std::vector<std::string> chapters_;
};

Taxonomy parse_taxonomy(std::string_view json_text);
Taxonomy load_taxonomy(const std::filesystem::path& path);
/// Pretty-printed JSON array in canonical key order; parse(serialize(t)) == t.
std::string serialize_taxonomy(const Taxonomy& taxonomy);

/// Expected counts for one chapter. Absent fields are not checked.
struct ChapterCounts {
  std::optional<long> codes;
  std::optional<long> names;
  std::map<ActionType, long> actions;       // counted over LO codes
  std::map<LOCategory, long> categories;    // counted over distinct LO names

  friend bool operator==(const ChapterCounts&, const ChapterCounts&) = default;
};
using Manifest = std::map<std::string, ChapterCounts, std::less<>>;

Manifest parse_manifest(std::string_view json_text);
Manifest load_manifest(const std::filesystem::path& path);
std::string serialize_manifest(const Manifest& manifest);
/// Complete manifest describing `taxonomy`.
Manifest manifest_of(const Taxonomy& taxonomy);

struct ManifestMismatch {
  std::string chapter;
  std::string field;  // "codes", "names", "action:Conc.ID", "category:Special Cases"
  long expected = 0;
  long actual = 0;

  friend bool operator==(const ManifestMismatch&, const ManifestMismatch&) = default;
};

/// Every expected count that differs from the taxonomy; empty iff all match.
std::vector<ManifestMismatch> validate_against_manifest(const Taxonomy& taxonomy,
                                                        const Manifest& manifest);

struct SearchFilters {
  std::optional<std::string> chapter;
  std::optional<LOCategory> category;
  std::optional<ActionType> action;
};

/// Case-insensitive substring search over code, name and item. Results are
/// ordered by (exact code match, name match, item match), then file order.
std::vector<LearningObjective> search_los(const Taxonomy& taxonomy, std::string_view query,
                                          const SearchFilters& filters = {});

}  // namespace atomiclo
