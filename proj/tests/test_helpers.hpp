#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "netinf/panel.hpp"

namespace netinf::testing {

// Small builder for hand-made panels.
struct PanelBuilder {
  TraitKind kind = TraitKind::Binary;
  std::vector<PersonRecord> persons;
  std::vector<ExamRecord> exams;
  std::vector<TieRecord> ties;

  PanelBuilder& person(std::string id, bool is_fp = true, bool female = false,
                       int birth_year = 1940) {
    persons.push_back({std::move(id), is_fp, female, birth_year});
    return *this;
  }

  PanelBuilder& exam(std::string id, int wave, double trait, double age = 40.0,
                     double education = 12.0) {
    exams.push_back({std::move(id), wave, 1970 + 3 * wave, trait, age, education});
    return *this;
  }

  PanelBuilder& tie(int wave, std::string src, std::string dst, TieKind kind = TieKind::Friend) {
    ties.push_back({wave, std::move(src), std::move(dst), kind});
    return *this;
  }

  CohortPanel build() const { return CohortPanel(kind, persons, exams, ties); }
};

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("netinf_test_" + tag);
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace netinf::testing
