#include "netinf/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <tuple>

#include "netinf/csv.hpp"

namespace netinf {

const char* to_string(TraitKind k) {
  return k == TraitKind::Binary ? "binary" : "count0to7";
}

const char* to_string(TieKind k) {
  switch (k) {
    case TieKind::Friend: return "friend";
    case TieKind::Spouse: return "spouse";
    case TieKind::Sibling: return "sibling";
    case TieKind::Coworker: return "coworker";
    case TieKind::Neighbor: return "neighbor";
  }
  return "?";
}

const char* to_string(TieClass c) {
  switch (c) {
    case TieClass::Mutual: return "mutual";
    case TieClass::FpNamesLp: return "fp_names_lp";
    case TieClass::LpNamesFp: return "lp_names_fp";
  }
  return "?";
}

std::optional<TieKind> tie_kind_from_string(std::string_view s) {
  if (s == "friend") return TieKind::Friend;
  if (s == "spouse") return TieKind::Spouse;
  if (s == "sibling") return TieKind::Sibling;
  if (s == "coworker") return TieKind::Coworker;
  if (s == "neighbor") return TieKind::Neighbor;
  return std::nullopt;
}

std::optional<TieClass> tie_class_from_string(std::string_view s) {
  if (s == "mutual") return TieClass::Mutual;
  if (s == "fp_names_lp") return TieClass::FpNamesLp;
  if (s == "lp_names_fp") return TieClass::LpNamesFp;
  return std::nullopt;
}

std::optional<TraitKind> trait_kind_from_string(std::string_view s) {
  if (s == "binary") return TraitKind::Binary;
  if (s == "count0to7") return TraitKind::Count0to7;
  return std::nullopt;
}

static void check_trait_value(TraitKind kind, double trait, const std::string& context) {
  if (kind == TraitKind::Binary) {
    if (trait != 0.0 && trait != 1.0) {
      throw PanelError(context + ": trait " + format_double(trait) +
                       " out of range for binary panel (must be 0 or 1)");
    }
  } else {
    if (trait < 0.0 || trait > 7.0 || trait != std::floor(trait)) {
      throw PanelError(context + ": trait " + format_double(trait) +
                       " out of range for count0to7 panel (must be an integer in 0..7)");
    }
  }
}

CohortPanel::CohortPanel(TraitKind trait_kind, std::vector<PersonRecord> persons,
                         std::vector<ExamRecord> exams, std::vector<TieRecord> ties)
    : trait_kind_(trait_kind),
      persons_(std::move(persons)),
      exams_(std::move(exams)),
      ties_(std::move(ties)) {
  // canonical order: determinism independent of insertion order
  std::sort(persons_.begin(), persons_.end(),
            [](const PersonRecord& a, const PersonRecord& b) { return a.person_id < b.person_id; });
  std::sort(exams_.begin(), exams_.end(), [](const ExamRecord& a, const ExamRecord& b) {
    return std::tie(a.person_id, a.wave) < std::tie(b.person_id, b.wave);
  });
  std::sort(ties_.begin(), ties_.end(), [](const TieRecord& a, const TieRecord& b) {
    return std::tie(a.wave, a.source_id, a.target_id, a.kind) <
           std::tie(b.wave, b.source_id, b.target_id, b.kind);
  });

  for (std::size_t i = 0; i < persons_.size(); ++i) {
    const PersonRecord& p = persons_[i];
    if (p.person_id.empty()) throw PanelError("person with empty id");
    if (!person_index_.emplace(p.person_id, i).second) {
      throw PanelError("duplicate person_id '" + p.person_id + "'");
    }
    if (p.birth_year < 1850 || p.birth_year > 2100) {
      throw PanelError("person '" + p.person_id + "': implausible birth_year " +
                       std::to_string(p.birth_year));
    }
  }

  for (std::size_t i = 0; i < exams_.size(); ++i) {
    const ExamRecord& e = exams_[i];
    const std::string ctx = "exam for person '" + e.person_id + "' wave " + std::to_string(e.wave);
    if (!person_index_.count(e.person_id)) throw PanelError(ctx + ": unknown person");
    if (e.wave < 1 || e.wave > 7) throw PanelError(ctx + ": wave must be 1..7");
    if (!exam_index_.emplace(std::make_pair(e.person_id, e.wave), i).second) {
      throw PanelError(ctx + ": duplicate (person, wave) exam");
    }
    check_trait_value(trait_kind_, e.trait, ctx);
    if (e.age_years < 0.0) throw PanelError(ctx + ": negative age_years");
    if (e.education_years < 0.0) throw PanelError(ctx + ": negative education_years");
    max_wave_ = std::max(max_wave_, e.wave);
  }

  for (const TieRecord& t : ties_) {
    const std::string ctx = "tie " + t.source_id + " -> " + t.target_id + " wave " +
                            std::to_string(t.wave);
    if (t.wave < 1 || t.wave > 7) throw PanelError(ctx + ": wave must be 1..7");
    if (t.source_id == t.target_id) throw PanelError(ctx + ": self-tie is not allowed");
    if (!person_index_.count(t.source_id)) {
      throw PanelError(ctx + ": source person '" + t.source_id + "' not in persons table");
    }
    if (!person_index_.count(t.target_id)) {
      throw PanelError(ctx + ": target person '" + t.target_id + "' not in persons table");
    }
    tie_index_.insert({t.wave, t.source_id, t.target_id, t.kind});
    max_wave_ = std::max(max_wave_, t.wave);
  }
}

const PersonRecord* CohortPanel::person(const std::string& id) const {
  auto it = person_index_.find(id);
  return it == person_index_.end() ? nullptr : &persons_[it->second];
}

const ExamRecord* CohortPanel::exam(const std::string& id, int wave) const {
  auto it = exam_index_.find(std::make_pair(id, wave));
  return it == exam_index_.end() ? nullptr : &exams_[it->second];
}

bool CohortPanel::has_tie(int wave, const std::string& source, const std::string& target,
                          std::optional<TieKind> kind) const {
  if (kind) return tie_index_.count({wave, source, target, *kind}) > 0;
  for (int k = 0; k < 5; ++k) {
    if (tie_index_.count({wave, source, target, static_cast<TieKind>(k)})) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// CSV load / save
// ---------------------------------------------------------------------------

namespace {

void require_header(const CsvTable& t, const std::vector<std::string>& expected,
                    const std::string& path) {
  if (t.header != expected) {
    throw PanelError(path + ": bad header '" + csv_join(t.header) + "', expected '" +
                     csv_join(expected) + "'");
  }
}

struct FieldParser {
  const std::string& path;
  const std::vector<std::string>& header;

  [[noreturn]] void fail(std::size_t line, std::size_t col, const std::string& what) const {
    throw PanelError(path + " line " + std::to_string(line) + ", column '" + header[col] +
                     "': " + what);
  }

  void check_width(const std::vector<std::string>& row, std::size_t line) const {
    if (row.size() != header.size()) {
      throw PanelError(path + " line " + std::to_string(line) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(row.size()));
    }
  }

  int parse_int(const std::vector<std::string>& row, std::size_t line, std::size_t col) const {
    const std::string& s = row[col];
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size()) fail(line, col, "not an integer: '" + s + "'");
    return static_cast<int>(v);
  }

  double parse_double(const std::vector<std::string>& row, std::size_t line, std::size_t col) const {
    const std::string& s = row[col];
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) fail(line, col, "not a number: '" + s + "'");
    return v;
  }

  bool parse_bool01(const std::vector<std::string>& row, std::size_t line, std::size_t col) const {
    const std::string& s = row[col];
    if (s == "0") return false;
    if (s == "1") return true;
    fail(line, col, "expected 0 or 1, got '" + s + "'");
  }
};

}  // namespace

CohortPanel load_panel(const std::string& persons_path, const std::string& exams_path,
                       const std::string& ties_path, TraitKind trait_kind) {
  const CsvTable pt = read_csv(persons_path);
  require_header(pt, {"person_id", "is_fp", "female", "birth_year"}, persons_path);
  FieldParser pp{persons_path, pt.header};
  std::vector<PersonRecord> persons;
  persons.reserve(pt.rows.size());
  for (std::size_t i = 0; i < pt.rows.size(); ++i) {
    const auto& row = pt.rows[i];
    const std::size_t line = pt.line_numbers[i];
    pp.check_width(row, line);
    persons.push_back({row[0], pp.parse_bool01(row, line, 1), pp.parse_bool01(row, line, 2),
                       pp.parse_int(row, line, 3)});
  }

  const CsvTable et = read_csv(exams_path);
  require_header(et, {"person_id", "wave", "exam_year", "trait", "age_years", "education_years"},
                 exams_path);
  FieldParser ep{exams_path, et.header};
  std::vector<ExamRecord> exams;
  exams.reserve(et.rows.size());
  for (std::size_t i = 0; i < et.rows.size(); ++i) {
    const auto& row = et.rows[i];
    const std::size_t line = et.line_numbers[i];
    ep.check_width(row, line);
    ExamRecord e{row[0],
                 ep.parse_int(row, line, 1),
                 ep.parse_int(row, line, 2),
                 ep.parse_double(row, line, 3),
                 ep.parse_double(row, line, 4),
                 ep.parse_double(row, line, 5)};
    try {
      check_trait_value(trait_kind, e.trait, "trait");
    } catch (const PanelError&) {
      ep.fail(line, 3, "trait " + row[3] + " out of range for " +
                           std::string(to_string(trait_kind)) + " panel");
    }
    exams.push_back(std::move(e));
  }

  const CsvTable tt = read_csv(ties_path);
  require_header(tt, {"wave", "source_id", "target_id", "tie_kind"}, ties_path);
  FieldParser tp{ties_path, tt.header};
  std::vector<TieRecord> ties;
  ties.reserve(tt.rows.size());
  for (std::size_t i = 0; i < tt.rows.size(); ++i) {
    const auto& row = tt.rows[i];
    const std::size_t line = tt.line_numbers[i];
    tp.check_width(row, line);
    const auto kind = tie_kind_from_string(row[3]);
    if (!kind) tp.fail(line, 3, "unknown tie_kind '" + row[3] + "'");
    if (row[1] == row[2]) {
      throw PanelError(ties_path + " line " + std::to_string(line) + ": self-tie '" + row[1] +
                       "' -> '" + row[2] + "' is not allowed");
    }
    ties.push_back({tp.parse_int(row, line, 0), row[1], row[2], *kind});
  }

  return CohortPanel(trait_kind, std::move(persons), std::move(exams), std::move(ties));
}

void save_panel(const CohortPanel& panel, const std::string& persons_path,
                const std::string& exams_path, const std::string& ties_path) {
  std::string out = "person_id,is_fp,female,birth_year\n";
  for (const PersonRecord& p : panel.persons()) {
    out += p.person_id;
    out += p.is_fp ? ",1" : ",0";
    out += p.female ? ",1" : ",0";
    out += "," + std::to_string(p.birth_year) + "\n";
  }
  write_file_atomic(persons_path, out);

  out = "person_id,wave,exam_year,trait,age_years,education_years\n";
  for (const ExamRecord& e : panel.exams()) {
    out += e.person_id + "," + std::to_string(e.wave) + "," + std::to_string(e.exam_year) + "," +
           format_double(e.trait) + "," + format_double(e.age_years) + "," +
           format_double(e.education_years) + "\n";
  }
  write_file_atomic(exams_path, out);

  out = "wave,source_id,target_id,tie_kind\n";
  for (const TieRecord& t : panel.ties()) {
    out += std::to_string(t.wave) + "," + t.source_id + "," + t.target_id + "," +
           to_string(t.kind) + "\n";
  }
  write_file_atomic(ties_path, out);
}

// ---------------------------------------------------------------------------
// Tie classification and tie sets
// ---------------------------------------------------------------------------

std::optional<TieClass> classify_tie(const CohortPanel& panel, const std::string& fp,
                                     const std::string& alter, int wave,
                                     std::optional<TieKind> kind) {
  const PersonRecord* p = panel.person(fp);
  if (!p) throw PanelError("classify_tie: unknown person '" + fp + "'");
  if (!p->is_fp) throw PanelError("classify_tie: person '" + fp + "' is not a focal participant");
  const bool out = panel.has_tie(wave, fp, alter, kind);
  const bool in = panel.has_tie(wave, alter, fp, kind);
  if (out && in) return TieClass::Mutual;
  if (out) return TieClass::FpNamesLp;
  if (in) return TieClass::LpNamesFp;
  return std::nullopt;
}

TieSet tie_set(const CohortPanel& panel, int wave, const TieSelector& selector) {
  if (wave < 2) {
    throw PanelError("tie_set: wave must be >= 2 (wave " + std::to_string(wave) +
                     " has no lagged data)");
  }
  std::set<std::pair<std::string, std::string>> candidates;
  for (const TieRecord& t : panel.ties()) {
    if (t.wave != wave) continue;
    if (selector.kind && t.kind != *selector.kind) continue;
    const PersonRecord* src = panel.person(t.source_id);
    const PersonRecord* dst = panel.person(t.target_id);
    if (src && src->is_fp) candidates.insert({t.source_id, t.target_id});
    if (dst && dst->is_fp) candidates.insert({t.target_id, t.source_id});
  }

  TieSet result;
  result.wave = wave;
  for (const auto& [fp, alter] : candidates) {
    const auto cls = classify_tie(panel, fp, alter, wave, selector.kind);
    if (!cls) continue;
    if (selector.tie_class && *cls != *selector.tie_class) continue;
    if (selector.persistent) {
      const auto prev = classify_tie(panel, fp, alter, wave - 1, selector.kind);
      if (!prev) continue;
      if (selector.tie_class && *prev != *selector.tie_class) continue;
    }
    // both members need exams at the wave and the previous wave
    if (!panel.exam(fp, wave) || !panel.exam(fp, wave - 1)) continue;
    if (!panel.exam(alter, wave) || !panel.exam(alter, wave - 1)) continue;
    result.pairs.emplace_back(fp, alter);
  }
  return result;  // candidates set is ordered, so pairs are sorted already
}

}  // namespace netinf
