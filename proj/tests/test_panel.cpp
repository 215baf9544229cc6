#include <doctest.h>

#include <fstream>

#include "netinf/csv.hpp"
#include "netinf/panel.hpp"
#include "test_helpers.hpp"

using namespace netinf;
using netinf::testing::PanelBuilder;
using netinf::testing::TempDir;

namespace {

void write(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

void write_valid_fixture(const TempDir& dir) {
  write(dir.file("persons.csv"),
        "person_id,is_fp,female,birth_year\n"
        "a,1,0,1940\n"
        "b,1,1,1945\n"
        "c,0,0,1950\n");
  write(dir.file("exams.csv"),
        "person_id,wave,exam_year,trait,age_years,education_years\n"
        "a,1,1973,0,33,12\n"
        "a,2,1976,1,36,12\n"
        "b,1,1973,1,28,16\n"
        "b,2,1976,1,31,16\n"
        "c,1,1973,0,23,12\n");
  write(dir.file("ties.csv"),
        "wave,source_id,target_id,tie_kind\n"
        "1,a,b,friend\n"
        "2,a,b,friend\n");
}

}  // namespace

TEST_CASE("load_panel accepts a small valid fixture") {
  TempDir dir("panel_valid");
  write_valid_fixture(dir);
  const CohortPanel panel =
      load_panel(dir.file("persons.csv"), dir.file("exams.csv"), dir.file("ties.csv"),
                 TraitKind::Binary);
  CHECK(panel.persons().size() == 3);
  CHECK(panel.exams().size() == 5);
  CHECK(panel.ties().size() == 2);
  CHECK(panel.person("a")->is_fp);
  CHECK(panel.exam("b", 2)->trait == 1.0);
  CHECK(panel.max_wave() == 2);
}

TEST_CASE("load_panel rejects a self-tie") {
  TempDir dir("panel_selftie");
  write_valid_fixture(dir);
  write(dir.file("ties.csv"),
        "wave,source_id,target_id,tie_kind\n"
        "1,a,a,friend\n");
  CHECK_THROWS_WITH_AS(load_panel(dir.file("persons.csv"), dir.file("exams.csv"),
                                  dir.file("ties.csv"), TraitKind::Binary),
                       doctest::Contains("self-tie"), PanelError);
}

TEST_CASE("load_panel names the row of an out-of-range binary trait") {
  TempDir dir("panel_range");
  write_valid_fixture(dir);
  write(dir.file("exams.csv"),
        "person_id,wave,exam_year,trait,age_years,education_years\n"
        "a,1,1973,3,33,12\n");
  try {
    load_panel(dir.file("persons.csv"), dir.file("exams.csv"), dir.file("ties.csv"),
               TraitKind::Binary);
    FAIL("expected PanelError");
  } catch (const PanelError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("trait") != std::string::npos);
    CHECK(msg.find("out of range") != std::string::npos);
  }
}

TEST_CASE("load_panel rejects dangling tie endpoints and duplicate exams") {
  TempDir dir("panel_dangling");
  write_valid_fixture(dir);
  write(dir.file("ties.csv"),
        "wave,source_id,target_id,tie_kind\n"
        "1,a,zz,friend\n");
  CHECK_THROWS_WITH_AS(load_panel(dir.file("persons.csv"), dir.file("exams.csv"),
                                  dir.file("ties.csv"), TraitKind::Binary),
                       doctest::Contains("not in persons table"), PanelError);

  write_valid_fixture(dir);
  write(dir.file("exams.csv"),
        "person_id,wave,exam_year,trait,age_years,education_years\n"
        "a,1,1973,0,33,12\n"
        "a,1,1973,1,33,12\n");
  CHECK_THROWS_WITH_AS(load_panel(dir.file("persons.csv"), dir.file("exams.csv"),
                                  dir.file("ties.csv"), TraitKind::Binary),
                       doctest::Contains("duplicate (person, wave) exam"), PanelError);
}

TEST_CASE("load_panel rejects a bad header and a count trait out of range") {
  TempDir dir("panel_header");
  write_valid_fixture(dir);
  write(dir.file("persons.csv"), "id,is_fp,female,birth_year\na,1,0,1940\n");
  CHECK_THROWS_WITH_AS(load_panel(dir.file("persons.csv"), dir.file("exams.csv"),
                                  dir.file("ties.csv"), TraitKind::Binary),
                       doctest::Contains("bad header"), PanelError);

  write_valid_fixture(dir);
  write(dir.file("exams.csv"),
        "person_id,wave,exam_year,trait,age_years,education_years\n"
        "a,1,1973,8,33,12\n");
  CHECK_THROWS_AS(load_panel(dir.file("persons.csv"), dir.file("exams.csv"), dir.file("ties.csv"),
                             TraitKind::Count0to7),
                  PanelError);
}

TEST_CASE("classify_tie follows the naming directions") {
  const CohortPanel both = PanelBuilder{}
                               .person("f")
                               .person("l", /*is_fp=*/false)
                               .exam("f", 1, 0)
                               .exam("l", 1, 0)
                               .tie(1, "f", "l")
                               .tie(1, "l", "f")
                               .build();
  CHECK(classify_tie(both, "f", "l", 1) == TieClass::Mutual);

  const CohortPanel out_only =
      PanelBuilder{}.person("f").person("l", false).tie(1, "f", "l").build();
  CHECK(classify_tie(out_only, "f", "l", 1) == TieClass::FpNamesLp);

  const CohortPanel in_only =
      PanelBuilder{}.person("f").person("l", false).tie(1, "l", "f").build();
  CHECK(classify_tie(in_only, "f", "l", 1) == TieClass::LpNamesFp);

  CHECK(!classify_tie(in_only, "f", "l", 2).has_value());  // no tie at wave 2
  CHECK_THROWS_WITH_AS(classify_tie(in_only, "l", "f", 1),
                       doctest::Contains("not a focal participant"), PanelError);
}

TEST_CASE("classify_tie is antisymmetric between two FPs") {
  const CohortPanel panel = PanelBuilder{}.person("f").person("g").tie(2, "f", "g").build();
  CHECK(classify_tie(panel, "f", "g", 2) == TieClass::FpNamesLp);
  CHECK(classify_tie(panel, "g", "f", 2) == TieClass::LpNamesFp);
}

TEST_CASE("tie_set keeps a persistent mutual pair") {
  PanelBuilder b;
  b.person("f").person("g");
  for (int wave = 1; wave <= 3; ++wave) {
    b.exam("f", wave, 0).exam("g", wave, 1);
  }
  // mutual at waves 2 and 3
  b.tie(2, "f", "g").tie(2, "g", "f").tie(3, "f", "g").tie(3, "g", "f");
  const CohortPanel panel = b.build();

  const TieSelector selector{TieKind::Friend, TieClass::Mutual, /*persistent=*/true};
  const TieSet ts = tie_set(panel, 3, selector);
  REQUIRE(ts.pairs.size() == 2);  // both are FPs, so both orientations appear
  CHECK(ts.pairs[0] == std::make_pair(std::string("f"), std::string("g")));
  CHECK(ts.pairs[1] == std::make_pair(std::string("g"), std::string("f")));
}

TEST_CASE("tie_set with a direction flip between waves yields no persistent one-way pair") {
  // f named g at wave 2, but at wave 3 the naming flipped to g -> f.
  // Hand enumeration: the pair (f, g) is FpNamesLp at wave 2 and LpNamesFp at
  // wave 3, so a persistent FpNamesLp selector at wave 3 matches nothing.
  PanelBuilder b;
  b.person("f").person("g", /*is_fp=*/false);
  for (int wave = 1; wave <= 3; ++wave) {
    b.exam("f", wave, 0).exam("g", wave, 1);
  }
  b.tie(2, "f", "g").tie(3, "g", "f");
  const CohortPanel panel = b.build();

  const TieSelector selector{TieKind::Friend, TieClass::FpNamesLp, /*persistent=*/true};
  CHECK(tie_set(panel, 3, selector).pairs.empty());

  // without persistence the wave-3 class is LpNamesFp
  const TieSelector lp_now{TieKind::Friend, TieClass::LpNamesFp, false};
  CHECK(tie_set(panel, 3, lp_now).pairs.size() == 1);
}

TEST_CASE("tie_set requires a lagged wave and excludes pairs with missing exams") {
  PanelBuilder b;
  b.person("f").person("g", false);
  b.exam("f", 1, 0).exam("f", 2, 0).exam("g", 2, 1);  // g has no wave-1 exam
  b.tie(2, "f", "g");
  const CohortPanel panel = b.build();

  CHECK_THROWS_WITH_AS(tie_set(panel, 1, TieSelector{}), doctest::Contains("no lagged data"),
                       PanelError);
  CHECK(tie_set(panel, 2, TieSelector{}).pairs.empty());
}

TEST_CASE("tie_set over an empty tie table is empty") {
  const CohortPanel panel = PanelBuilder{}.person("f").exam("f", 1, 0).exam("f", 2, 0).build();
  CHECK(tie_set(panel, 2, TieSelector{}).pairs.empty());
}

TEST_CASE("tie_set filters by tie kind") {
  PanelBuilder b;
  b.person("f").person("g", false);
  for (int wave = 1; wave <= 2; ++wave) b.exam("f", wave, 0).exam("g", wave, 1);
  b.tie(2, "f", "g", TieKind::Spouse);
  const CohortPanel panel = b.build();

  CHECK(tie_set(panel, 2, TieSelector{TieKind::Friend, std::nullopt, false}).pairs.empty());
  CHECK(tie_set(panel, 2, TieSelector{TieKind::Spouse, std::nullopt, false}).pairs.size() == 1);
  CHECK(tie_set(panel, 2, TieSelector{std::nullopt, std::nullopt, false}).pairs.size() == 1);
}

TEST_CASE("panel round-trips through serialization") {
  TempDir dir("panel_roundtrip");
  write_valid_fixture(dir);
  const CohortPanel panel =
      load_panel(dir.file("persons.csv"), dir.file("exams.csv"), dir.file("ties.csv"),
                 TraitKind::Binary);

  save_panel(panel, dir.file("p2.csv"), dir.file("e2.csv"), dir.file("t2.csv"));
  const CohortPanel again =
      load_panel(dir.file("p2.csv"), dir.file("e2.csv"), dir.file("t2.csv"), TraitKind::Binary);
  CHECK(panel == again);

  // a second serialization is byte-identical
  save_panel(again, dir.file("p3.csv"), dir.file("e3.csv"), dir.file("t3.csv"));
  CHECK(read_file(dir.file("p2.csv")) == read_file(dir.file("p3.csv")));
  CHECK(read_file(dir.file("e2.csv")) == read_file(dir.file("e3.csv")));
  CHECK(read_file(dir.file("t2.csv")) == read_file(dir.file("t3.csv")));
}

TEST_CASE("tie_set is deterministic under insertion order") {
  PanelBuilder b1, b2;
  b1.person("f").person("g").person("h", false);
  b2.person("h", false).person("g").person("f");
  for (auto* b : {&b1, &b2}) {
    for (int wave = 1; wave <= 2; ++wave) {
      b->exam("f", wave, 0).exam("g", wave, 1).exam("h", wave, 0);
    }
  }
  b1.tie(2, "f", "g").tie(2, "f", "h").tie(2, "g", "f");
  b2.tie(2, "g", "f").tie(2, "f", "h").tie(2, "f", "g");
  const TieSet t1 = tie_set(b1.build(), 2, TieSelector{});
  const TieSet t2 = tie_set(b2.build(), 2, TieSelector{});
  CHECK(t1.pairs == t2.pairs);
  REQUIRE(t1.pairs.size() == 3);
  CHECK(std::is_sorted(t1.pairs.begin(), t1.pairs.end()));
}
