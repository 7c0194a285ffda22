#include "atomiclo/prompting.hpp"

#include <cctype>

#include "json_io.hpp"

namespace atomiclo {

namespace assets {
extern const std::string_view k_simple;
extern const std::string_view k_explanation;
extern const std::string_view k_cot;
extern const std::string_view k_format_structured;
extern const std::string_view k_format_natural_language;
}  // namespace assets

namespace {

constexpr std::string_view kOpen = "[INSERT ";

// Lowercases the leading letter so a field reads naturally mid-sentence,
// unless the first word is an acronym ("KE of ...").
std::string mid_sentence(std::string_view text) {
  auto out = detail::trim(text);
  if (out.size() >= 2 && std::isupper(static_cast<unsigned char>(out[0])) &&
      !std::isupper(static_cast<unsigned char>(out[1]))) {
    out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  } else if (out.size() == 1) {
    out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  }
  return out;
}

std::string without_final_period(std::string text) {
  while (!text.empty() && text.back() == '.') text.pop_back();
  return text;
}

}  // namespace

std::string_view to_string(PromptStrategy strategy) noexcept {
  switch (strategy) {
    case PromptStrategy::Simple: return "Simple";
    case PromptStrategy::Explanation: return "Explanation";
    case PromptStrategy::CoT: return "CoT";
  }
  return "";
}

std::string_view to_string(LOFormat format) noexcept {
  switch (format) {
    case LOFormat::Structured: return "Structured";
    case LOFormat::NaturalLanguage: return "NaturalLanguage";
  }
  return "";
}

PromptStrategy parse_strategy(std::string_view text) {
  const auto key = detail::to_lower(detail::trim(text));
  if (key == "simple") return PromptStrategy::Simple;
  if (key == "explanation") return PromptStrategy::Explanation;
  if (key == "cot" || key == "chain-of-thought") return PromptStrategy::CoT;
  throw Error(ErrorCode::ConfigInvalid, "unknown prompting strategy '" + std::string(text) + "'");
}

LOFormat parse_format(std::string_view text) {
  const auto key = detail::to_lower(detail::trim(text));
  if (key == "structured" || key == "1") return LOFormat::Structured;
  if (key == "naturallanguage" || key == "natural_language" || key == "natural language" ||
      key == "2") {
    return LOFormat::NaturalLanguage;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown LO format '" + std::string(text) + "'");
}

std::string render_lo(const LearningObjective& lo, LOFormat format) {
  const auto code = lo.code.str();
  if (format == LOFormat::Structured) {
    return code + ": " + lo.name + ", " + lo.item + ", Provided: " + lo.provided +
           ", Outcome: " + lo.outcome;
  }
  return code + ": LO Name: " + lo.name + ", Description: " + lo.item + ", Explanation: Given " +
         mid_sentence(lo.provided) + ", the student should be able to " +
         without_final_period(mid_sentence(lo.outcome)) + ".";
}

std::string_view prompt_template(PromptStrategy strategy) noexcept {
  switch (strategy) {
    case PromptStrategy::Simple: return assets::k_simple;
    case PromptStrategy::Explanation: return assets::k_explanation;
    case PromptStrategy::CoT: return assets::k_cot;
  }
  return {};
}

std::string_view format_description(LOFormat format) noexcept {
  return format == LOFormat::Structured ? assets::k_format_structured
                                        : assets::k_format_natural_language;
}

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find(kOpen, pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find(']', open + kOpen.size());
    if (close == std::string_view::npos) break;
    const auto name = std::string(tmpl.substr(open + kOpen.size(), close - open - kOpen.size()));
    out.append(tmpl.substr(pos, open - pos));
    if (auto it = values.find(name); it != values.end()) {
      out.append(it->second);
    } else {
      out.append(tmpl.substr(open, close - open + 1));
    }
    pos = close + 1;
  }
  out.append(tmpl.substr(pos));
  return out;
}

PromptSpec build_prompt(const Question& question, std::span<const LearningObjective> lo_subset,
                        PromptStrategy strategy, LOFormat format) {
  if (lo_subset.empty()) {
    throw Error(ErrorCode::EmptyLOSubset, "question '" + question.id + "'");
  }
  std::string objectives;
  for (const auto& lo : lo_subset) {
    if (!objectives.empty()) objectives += '\n';
    objectives += render_lo(lo, format);
  }
  PromptSpec spec;
  spec.strategy = strategy;
  spec.format = format;
  spec.lo_subset.assign(lo_subset.begin(), lo_subset.end());
  spec.question = question;
  spec.rendered_text = fill_template(prompt_template(strategy),
                                     {{std::string(kFormatPlaceholder), std::string(format_description(format))},
                                      {std::string(kObjectivesPlaceholder), objectives},
                                      {std::string(kQuestionPlaceholder), question.text}});
  return spec;
}

}  // namespace atomiclo
