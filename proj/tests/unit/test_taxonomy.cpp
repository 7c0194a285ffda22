#include <random>
#include <set>

#include <gtest/gtest.h>

#include "atomiclo/taxonomy.hpp"
#include "test_data.hpp"

namespace {

using namespace atomiclo;
using atomiclo::testing::code_of;
using atomiclo::testing::data_path;
using atomiclo::testing::energy_taxonomy;
using atomiclo::testing::make_lo;
using atomiclo::testing::three_chapters;

TEST(LOCode, ParsesReferenceCodes) {
  EXPECT_EQ(parse_lo_code("ME-KE-2"), (LOCode{"ME", "KE", 2}));
  EXPECT_EQ(parse_lo_code("LM-ILM-2"), (LOCode{"LM", "ILM", 2}));
  EXPECT_EQ(parse_lo_code("NL-N2L-11").term, "N2L");
}

TEST(LOCode, RejectsMalformedCodes) {
  for (const char* bad : {"ME_KE_2", "ME-KE", "ME-KE-x", "me-ke-2", "ME-KE-0", "ME-KE-02",
                          "ME--2", "-KE-2", "ME-KE-2-1", " ME-KE-2", "ME-KE-1234567890", ""}) {
    EXPECT_EQ(code_of([&] { parse_lo_code(bad); }), ErrorCode::InvalidCodeFormat) << bad;
    EXPECT_FALSE(try_parse_lo_code(bad).has_value()) << bad;
  }
}

TEST(LOCode, RoundTripsRandomCodes) {
  std::mt19937 rng(20240501);
  std::uniform_int_distribution<int> len(1, 5), letter(0, 25), digit(0, 9);
  std::uniform_int_distribution<std::uint32_t> index(1, 999999999);
  for (int i = 0; i < 1000; ++i) {
    LOCode code;
    for (int k = len(rng); k > 0; --k) code.topic += static_cast<char>('A' + letter(rng));
    for (int k = len(rng); k > 0; --k) {
      code.term += (rng() % 4 == 0) ? static_cast<char>('0' + digit(rng))
                                    : static_cast<char>('A' + letter(rng));
    }
    code.index = index(rng);
    ASSERT_EQ(parse_lo_code(code.str()), code) << code.str();
  }
}

TEST(Enums, AcceptLenientSpellingsAndEmitCanonicalForms) {
  EXPECT_EQ(parse_action("Conc. ID"), ActionType::ConcID);
  EXPECT_EQ(parse_action("Proc.app"), ActionType::ProcApp);
  EXPECT_EQ(parse_action("rep_map"), ActionType::RepMap);
  EXPECT_EQ(to_string(ActionType::ConcProp), "Conc.Prop");
  EXPECT_EQ(code_of([] { parse_action("Recall"); }), ErrorCode::UnknownAction);

  EXPECT_EQ(parse_category("Physics Law"), LOCategory::PhysicsLaws);
  EXPECT_EQ(parse_category("special case"), LOCategory::SpecialCases);
  EXPECT_EQ(parse_category("Representation"), LOCategory::Representations);
  EXPECT_EQ(to_string(LOCategory::SpecialCases), "Special Cases");
  EXPECT_EQ(code_of([] { parse_category("Misc"); }), ErrorCode::UnknownCategory);
}

TEST(NormalizeName, CollapsesWhitespace) {
  EXPECT_EQ(normalize_name("  Kinetic   Energy\t(KE) "), "Kinetic Energy (KE)");
  EXPECT_EQ(normalize_name(""), "");
}

TEST(LoadTaxonomy, EnergyFixtureCounts) {
  const auto& t = energy_taxonomy();
  EXPECT_EQ(t.size(), 20u);
  std::set<std::string> names;
  std::map<ActionType, int> actions;
  for (const auto& lo : t.objectives()) {
    names.insert(lo.name);
    ++actions[lo.action];
  }
  EXPECT_EQ(names.size(), 10u);
  EXPECT_EQ(actions[ActionType::ConcID], 5);
  EXPECT_EQ(actions[ActionType::ConcProp], 5);
  EXPECT_EQ(actions[ActionType::ProcApp], 7);
  EXPECT_EQ(actions[ActionType::RepMap], 3);
}

TEST(LoadTaxonomy, RejectsDuplicateCode) {
  const auto lo = R"({"code":"ME-KE-1","name":"KE","item":"i","action":"Conc.ID",
                      "provided":"p","outcome":"o","category":"Physics Laws","chapter":"Energy"})";
  const std::string doc = std::string("[") + lo + "," + lo + "]";
  EXPECT_EQ(code_of([&] { parse_taxonomy(doc); }), ErrorCode::DuplicateCode);
}

TEST(LoadTaxonomy, ReportsMissingAndUnknownFields) {
  EXPECT_EQ(code_of([] {
              parse_taxonomy(R"([{"code":"ME-KE-1","name":"KE","item":"i","action":"Conc.ID",
                                  "provided":"p","category":"Physics Laws","chapter":"Energy"}])");
            }),
            ErrorCode::MissingField);
  EXPECT_EQ(code_of([] {
              parse_taxonomy(R"([{"code":"ME-KE-1","name":"KE","item":"i","action":"Guess",
                                  "provided":"p","outcome":"o","category":"Physics Laws",
                                  "chapter":"Energy"}])");
            }),
            ErrorCode::UnknownAction);
  EXPECT_EQ(code_of([] {
              parse_taxonomy(R"([{"code":"ME-KE-1","name":"KE","item":"i","action":"Conc.ID",
                                  "provided":"p","outcome":"o","category":"Other",
                                  "chapter":"Energy"}])");
            }),
            ErrorCode::UnknownCategory);
  EXPECT_EQ(code_of([] { parse_taxonomy("{}"); }), ErrorCode::ParseError);
}

TEST(LoadTaxonomy, RejectsNameSharedAcrossChapters) {
  EXPECT_EQ(code_of([] {
              Taxonomy::from_objectives({make_lo("ME-W-1", "Work (W)", ActionType::ConcID, "Energy"),
                                         make_lo("NL-W-1", "Work (W)", ActionType::ConcID, "Newton")});
            }),
            ErrorCode::InconsistentName);
}

TEST(LoadTaxonomy, SerializationIsIdempotent) {
  const auto& t = three_chapters();
  const auto text = serialize_taxonomy(t);
  const auto again = parse_taxonomy(text);
  EXPECT_EQ(again, t);
  EXPECT_EQ(serialize_taxonomy(again), text);
}

TEST(Manifest, BundledManifestsMatch) {
  const auto& t = three_chapters();
  EXPECT_TRUE(validate_against_manifest(t, load_manifest(data_path("manifests/selected_chapters.json"))).empty());
  EXPECT_TRUE(validate_against_manifest(energy_taxonomy(), load_manifest(data_path("manifests/energy.json"))).empty());
  const auto lm = load_taxonomy(data_path("taxonomy/linear_momentum.json"));
  EXPECT_TRUE(validate_against_manifest(lm, load_manifest(data_path("manifests/linear_momentum.json"))).empty());
}

TEST(Manifest, PartialManifestChecksOnlyListedFields) {
  const auto m = parse_manifest(R"({"Linear Momentum": {"codes": 18, "names": 6, "actions": {"Rep.Map": 0}}})");
  EXPECT_TRUE(validate_against_manifest(three_chapters(), m).empty());
}

TEST(Manifest, ReportsEachMismatch) {
  const auto m = parse_manifest(R"({"Energy": {"codes": 21}})");
  const auto report = validate_against_manifest(energy_taxonomy(), m);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0], (ManifestMismatch{"Energy", "codes", 21, 20}));
}

TEST(Manifest, SelfManifestIsAlwaysClean) {
  for (const auto* t : {&energy_taxonomy(), &three_chapters()}) {
    const auto m = manifest_of(*t);
    EXPECT_TRUE(validate_against_manifest(*t, m).empty());
    EXPECT_EQ(parse_manifest(serialize_manifest(m)), m);
  }
}

TEST(SubsetByChapter, ReturnsChapterInFileOrder) {
  const auto& t = three_chapters();
  EXPECT_EQ(t.subset_by_chapter("Energy").size(), 20u);
  EXPECT_EQ(t.subset_by_chapter("Newton's Laws").size(), 41u);
  EXPECT_EQ(t.subset_by_chapter("Linear Momentum").size(), 18u);
  EXPECT_EQ(code_of([&] { t.subset_by_chapter("Optics"); }), ErrorCode::UnknownChapter);

  const auto energy = t.subset_by_chapter("Energy");
  for (std::size_t i = 1; i < energy.size(); ++i) {
    EXPECT_LT(t.position(energy[i - 1].code), t.position(energy[i].code));
  }
}

TEST(SubsetByChapter, ChaptersPartitionTheTaxonomy) {
  const auto& t = three_chapters();
  std::set<LOCode> seen;
  std::size_t total = 0;
  for (const auto& chapter : t.chapters()) {
    for (const auto& lo : t.subset_by_chapter(chapter)) {
      EXPECT_TRUE(seen.insert(lo.code).second);
      ++total;
    }
  }
  EXPECT_EQ(total, t.size());
}

TEST(SearchLOs, MatchesCodeNameAndItem) {
  const auto& t = energy_taxonomy();
  const auto ke = search_los(t, "KE");
  auto has = [&](const char* code) {
    return std::any_of(ke.begin(), ke.end(), [&](const auto& lo) { return lo.code.str() == code; });
  };
  EXPECT_TRUE(has("ME-KE-1"));
  EXPECT_TRUE(has("ME-KE-2"));

  const auto exact = search_los(t, "me-gpe-2");
  ASSERT_EQ(exact.size(), 1u);
  EXPECT_EQ(exact[0].code.str(), "ME-GPE-2");

  EXPECT_TRUE(search_los(t, "zzzz").empty());
  EXPECT_EQ(search_los(t, "").size(), t.size());
}

TEST(SearchLOs, RanksExactCodeFirstAndAppliesFilters) {
  const auto& t = three_chapters();
  const auto w = search_los(t, "ME-W-1");
  ASSERT_FALSE(w.empty());
  EXPECT_EQ(w[0].code.str(), "ME-W-1");

  SearchFilters filters;
  filters.chapter = "Energy";
  filters.action = ActionType::RepMap;
  const auto maps = search_los(t, "", filters);
  EXPECT_EQ(maps.size(), 3u);
  for (const auto& lo : maps) {
    EXPECT_EQ(lo.chapter, "Energy");
    EXPECT_EQ(lo.action, ActionType::RepMap);
  }

  filters = {};
  filters.category = LOCategory::SpecialCases;
  for (const auto& lo : search_los(t, "", filters)) EXPECT_EQ(lo.category, LOCategory::SpecialCases);
}

}  // namespace
