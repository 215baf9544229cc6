#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace netinf {

enum class TraitKind { Binary, Count0to7 };
enum class TieKind { Friend, Spouse, Sibling, Coworker, Neighbor };
enum class TieClass { Mutual, FpNamesLp, LpNamesFp };

const char* to_string(TraitKind k);
const char* to_string(TieKind k);
const char* to_string(TieClass c);
std::optional<TieKind> tie_kind_from_string(std::string_view s);
std::optional<TieClass> tie_class_from_string(std::string_view s);
std::optional<TraitKind> trait_kind_from_string(std::string_view s);

struct PersonRecord {
  std::string person_id;
  bool is_fp = false;
  bool female = false;
  int birth_year = 0;
  bool operator==(const PersonRecord&) const = default;
};

struct ExamRecord {
  std::string person_id;
  int wave = 0;           // 1..7
  int exam_year = 0;
  double trait = 0.0;     // binary 0/1, or count 0..7
  double age_years = 0.0;
  double education_years = 0.0;
  bool operator==(const ExamRecord&) const = default;
};

struct TieRecord {
  int wave = 0;
  std::string source_id;  // source named target
  std::string target_id;
  TieKind kind = TieKind::Friend;
  bool operator==(const TieRecord&) const = default;
};

struct PanelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Which ties a tie set admits: kind filter, required directional class, and
// whether the tie must also have existed at the previous wave.
struct TieSelector {
  std::optional<TieKind> kind = TieKind::Friend;
  std::optional<TieClass> tie_class;  // nullopt = any class
  bool persistent = false;
};

struct TieSet {
  int wave = 0;
  std::vector<std::pair<std::string, std::string>> pairs;  // (fp_id, alter_id), sorted
};

// Longitudinal cohort: persons, per-wave exams, directed ties. Immutable
// after construction; safe to share read-only across workers.
class CohortPanel {
 public:
  CohortPanel(TraitKind trait_kind, std::vector<PersonRecord> persons,
              std::vector<ExamRecord> exams, std::vector<TieRecord> ties);

  TraitKind trait_kind() const { return trait_kind_; }
  const std::vector<PersonRecord>& persons() const { return persons_; }
  const std::vector<ExamRecord>& exams() const { return exams_; }
  const std::vector<TieRecord>& ties() const { return ties_; }

  const PersonRecord* person(const std::string& id) const;
  const ExamRecord* exam(const std::string& id, int wave) const;
  bool has_tie(int wave, const std::string& source, const std::string& target,
               std::optional<TieKind> kind = std::nullopt) const;
  int max_wave() const { return max_wave_; }

  bool operator==(const CohortPanel& other) const {
    return trait_kind_ == other.trait_kind_ && persons_ == other.persons_ &&
           exams_ == other.exams_ && ties_ == other.ties_;
  }

 private:
  TraitKind trait_kind_;
  std::vector<PersonRecord> persons_;  // sorted by id
  std::vector<ExamRecord> exams_;      // sorted by (id, wave)
  std::vector<TieRecord> ties_;        // sorted by (wave, source, target, kind)
  std::unordered_map<std::string, std::size_t> person_index_;
  std::map<std::pair<std::string, int>, std::size_t> exam_index_;
  std::set<std::tuple<int, std::string, std::string, TieKind>> tie_index_;
  int max_wave_ = 0;
};

// CSV schemas:
//   persons.csv: person_id,is_fp,female,birth_year      (booleans as 0/1)
//   exams.csv:   person_id,wave,exam_year,trait,age_years,education_years
//   ties.csv:    wave,source_id,target_id,tie_kind      (tie_kind lower-case)
CohortPanel load_panel(const std::string& persons_path, const std::string& exams_path,
                       const std::string& ties_path, TraitKind trait_kind);

void save_panel(const CohortPanel& panel, const std::string& persons_path,
                const std::string& exams_path, const std::string& ties_path);

// Directional class of the (fp, alter) pair at a wave, or nullopt when no tie
// in either direction is present. fp must be a focal participant.
std::optional<TieClass> classify_tie(const CohortPanel& panel, const std::string& fp,
                                     const std::string& alter, int wave,
                                     std::optional<TieKind> kind = std::nullopt);

// All (fp, alter) pairs at the wave admitted by the selector. Pairs missing
// an exam at the wave or the previous wave (either member) are excluded:
// the lagged regressors would be undefined. Requires wave >= 2.
TieSet tie_set(const CohortPanel& panel, int wave, const TieSelector& selector);

}  // namespace netinf
