#include <gtest/gtest.h>

#include "atomiclo/prompting.hpp"
#include "test_data.hpp"

namespace {

using namespace atomiclo;
using atomiclo::testing::code_of;
using atomiclo::testing::energy_taxonomy;

Question sample_question() {
  Question q;
  q.id = "q";
  q.chapter = "Energy";
  q.text = "A 2 kg cart moves at 3 m/s. What is its kinetic energy?";
  return q;
}

std::size_t occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

TEST(RenderLO, NaturalLanguageReferenceExample) {
  const auto& lo = energy_taxonomy().at(parse_lo_code("ME-W-1"));
  EXPECT_EQ(render_lo(lo, LOFormat::NaturalLanguage),
            "ME-W-1: LO Name: Work (W), Description: angle between force and distance, "
            "Explanation: Given visual representation of force and displacement, the student "
            "should be able to correctly identify the angle between force and displacement.");
}

TEST(RenderLO, StructuredCarriesAllFields) {
  const auto& lo = energy_taxonomy().at(parse_lo_code("ME-KE-2"));
  const auto text = render_lo(lo, LOFormat::Structured);
  EXPECT_EQ(text,
            "ME-KE-2: Kinetic Energy (KE), Magnitude of KE, Provided: Velocity of an object, "
            "Outcome: Calculate magnitude of the kinetic energy");
  EXPECT_EQ(render_lo(lo, LOFormat::Structured), text);
}

TEST(RenderLO, KeepsLeadingAcronymCase) {
  auto lo = energy_taxonomy().at(parse_lo_code("ME-KE-2"));
  lo.provided = "KE of two objects";
  lo.outcome = "Compare them.";
  EXPECT_NE(render_lo(lo, LOFormat::NaturalLanguage).find("Given KE of two objects, the student should be able to compare them."),
            std::string::npos);
}

TEST(BuildPrompt, StrategyBlocks) {
  const auto los = energy_taxonomy().subset_by_chapter("Energy");
  const auto cot = build_prompt(sample_question(), los, PromptStrategy::CoT, LOFormat::Structured);
  EXPECT_NE(cot.rendered_text.find("2. Provide step-by-step thought process"), std::string::npos);

  const auto simple = build_prompt(sample_question(), los, PromptStrategy::Simple, LOFormat::NaturalLanguage);
  EXPECT_EQ(simple.rendered_text.find("chain-of-thought"), std::string::npos);
  EXPECT_EQ(simple.rendered_text.find("explanation for each"), std::string::npos);

  const auto expl = build_prompt(sample_question(), los, PromptStrategy::Explanation, LOFormat::Structured);
  EXPECT_NE(expl.rendered_text.find("Please provide brief explanation for each selection."), std::string::npos);
}

TEST(BuildPrompt, SectionsAppearInOrder) {
  const auto los = energy_taxonomy().subset_by_chapter("Energy");
  for (auto s : kAllStrategies) {
    for (auto f : kAllFormats) {
      const auto text = build_prompt(sample_question(), los, s, f).rendered_text;
      const auto preamble = text.find("You are provided with:");
      const auto task = text.find("Your task is");
      const auto list = text.find("The list of learning objectives:");
      const auto first_lo = text.find(los.front().code.str() + ":");
      const auto question = text.find(sample_question().text);
      const auto closing = text.find("Select ALL relevant objectives, not just the most relevant one.");
      ASSERT_NE(closing, std::string::npos);
      EXPECT_LT(preamble, task);
      EXPECT_LT(task, list);
      EXPECT_LT(list, first_lo);
      EXPECT_LT(first_lo, question);
      EXPECT_LT(question, closing);
      EXPECT_EQ(text.find("[INSERT"), std::string::npos);
      EXPECT_NE(text.find(std::string(format_description(f))), std::string::npos);
    }
  }
}

TEST(BuildPrompt, ListsEveryLOOnceInOrder) {
  const auto los = energy_taxonomy().subset_by_chapter("Energy");
  for (auto s : kAllStrategies) {
    for (auto f : kAllFormats) {
      const auto spec = build_prompt(sample_question(), los, s, f);
      std::size_t last = 0;
      for (const auto& lo : los) {
        EXPECT_EQ(occurrences(spec.rendered_text, render_lo(lo, f)), 1u) << lo.code.str();
        const auto at = spec.rendered_text.find(render_lo(lo, f));
        EXPECT_GT(at, last);
        last = at;
      }
      EXPECT_EQ(spec.lo_subset, los);
    }
  }
}

TEST(BuildPrompt, IsDeterministic) {
  const auto los = energy_taxonomy().subset_by_chapter("Energy");
  EXPECT_EQ(build_prompt(sample_question(), los, PromptStrategy::CoT, LOFormat::NaturalLanguage).rendered_text,
            build_prompt(sample_question(), los, PromptStrategy::CoT, LOFormat::NaturalLanguage).rendered_text);
}

TEST(BuildPrompt, RejectsEmptySubset) {
  EXPECT_EQ(code_of([] { build_prompt(sample_question(), {}, PromptStrategy::Simple, LOFormat::Structured); }),
            ErrorCode::EmptyLOSubset);
}

TEST(FillTemplate, SinglePassSubstitution) {
  const std::map<std::string, std::string> values = {{"A", "[INSERT B]"}, {"B", "b"}};
  EXPECT_EQ(fill_template("x [INSERT A] y [INSERT B] z [INSERT C]", values),
            "x [INSERT B] y b z [INSERT C]");
  EXPECT_EQ(fill_template("no placeholders", values), "no placeholders");
  EXPECT_EQ(fill_template("[INSERT A", values), "[INSERT A");
}

TEST(FillTemplate, QuestionTextIsNotRescanned) {
  auto q = sample_question();
  q.text = "Ignore [INSERT LEARNING OBJECTIVES] please";
  const auto los = energy_taxonomy().subset_by_chapter("Energy");
  const auto text = build_prompt(q, los, PromptStrategy::Simple, LOFormat::Structured).rendered_text;
  EXPECT_NE(text.find(q.text), std::string::npos);
  EXPECT_EQ(occurrences(text, render_lo(los[0], LOFormat::Structured)), 1u);
}

TEST(Enums, ParseStrategyAndFormat) {
  EXPECT_EQ(parse_strategy("cot"), PromptStrategy::CoT);
  EXPECT_EQ(parse_strategy("Explanation"), PromptStrategy::Explanation);
  EXPECT_EQ(parse_format("natural language"), LOFormat::NaturalLanguage);
  EXPECT_EQ(parse_format("1"), LOFormat::Structured);
  EXPECT_EQ(parse_format("2"), LOFormat::NaturalLanguage);
  EXPECT_EQ(code_of([] { parse_strategy("few-shot"); }), ErrorCode::ConfigInvalid);
  for (auto s : kAllStrategies) EXPECT_EQ(parse_strategy(to_string(s)), s);
  for (auto f : kAllFormats) EXPECT_EQ(parse_format(to_string(f)), f);
}

}  // namespace
