#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atomiclo/corpus.hpp"
#include "atomiclo/taxonomy.hpp"

namespace atomiclo {

enum class PromptStrategy { Simple, Explanation, CoT };
inline constexpr PromptStrategy kAllStrategies[] = {PromptStrategy::Simple,
                                                    PromptStrategy::Explanation,
                                                    PromptStrategy::CoT};

enum class LOFormat { Structured, NaturalLanguage };
inline constexpr LOFormat kAllFormats[] = {LOFormat::Structured, LOFormat::NaturalLanguage};

std::string_view to_string(PromptStrategy strategy) noexcept;
std::string_view to_string(LOFormat format) noexcept;
/// Throws Error{ConfigInvalid} on unknown names (case-insensitive).
PromptStrategy parse_strategy(std::string_view text);
LOFormat parse_format(std::string_view text);

/// Structured:      `CODE: NAME, ITEM, Provided: PROVIDED, Outcome: OUTCOME`
/// NaturalLanguage: `CODE: LO Name: NAME, Description: ITEM, Explanation:
///                   Given provided, the student should be able to outcome.`
std::string render_lo(const LearningObjective& lo, LOFormat format);

struct PromptSpec {
  PromptStrategy strategy = PromptStrategy::Simple;
  LOFormat format = LOFormat::Structured;
  std::vector<LearningObjective> lo_subset;
  Question question;
  std::string rendered_text;
};

/// Fills the strategy template with the format description, the rendered LO
/// list (one LO per line, in the given order) and the question text.
/// Throws Error{EmptyLOSubset}.
PromptSpec build_prompt(const Question& question, std::span<const LearningObjective> lo_subset,
                        PromptStrategy strategy, LOFormat format);

/// Raw template asset for a strategy, with `[INSERT ...]` placeholders.
std::string_view prompt_template(PromptStrategy strategy) noexcept;
std::string_view format_description(LOFormat format) noexcept;

/// Single-pass substitution of `[INSERT <NAME>]` placeholders. Substituted
/// text is never rescanned; unknown placeholders are left untouched.
std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

inline constexpr std::string_view kFormatPlaceholder = "FORMAT";
inline constexpr std::string_view kObjectivesPlaceholder = "LEARNING OBJECTIVES";
inline constexpr std::string_view kQuestionPlaceholder = "THE QUESTION";

}  // namespace atomiclo
