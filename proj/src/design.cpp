#include "netinf/design.hpp"

#include <stdexcept>

#include "netinf/csv.hpp"

namespace netinf {

const std::array<std::string, kNumCoef>& coef_names() {
  static const std::array<std::string, kNumCoef> names = {
      "(Intercept)", "alter_current", "alter_lagged", "ego_lagged",
      "wave3",       "wave4",         "wave5",        "wave6",
      "wave7",       "age",           "female",       "education"};
  return names;
}

Eigen::VectorXd params_to_vector(const ModelParams& p) {
  Eigen::VectorXd v(kNumCoef);
  v << p.alpha, p.beta1, p.beta2, p.beta3, p.gamma[0], p.gamma[1], p.gamma[2], p.gamma[3],
      p.gamma[4], p.delta1, p.delta2, p.delta3;
  return v;
}

ModelParams params_from_vector(const Eigen::VectorXd& v) {
  if (v.size() != kNumCoef) throw std::invalid_argument("params_from_vector: need 12 entries");
  ModelParams p;
  p.alpha = v[0];
  p.beta1 = v[1];
  p.beta2 = v[2];
  p.beta3 = v[3];
  for (int i = 0; i < 5; ++i) p.gamma[i] = v[4 + i];
  p.delta1 = v[9];
  p.delta2 = v[10];
  p.delta3 = v[11];
  return p;
}

Eigen::RowVectorXd row_covariates(const DesignRow& row) {
  Eigen::RowVectorXd x(kNumCoef);
  x << 1.0, row.alter_current, row.alter_lagged, row.ego_lagged, row.wave_dummies[0],
      row.wave_dummies[1], row.wave_dummies[2], row.wave_dummies[3], row.wave_dummies[4],
      row.age, row.female, row.education;
  return x;
}

static DesignRow make_row(const CohortPanel& panel, const std::string& fp,
                          const std::string& alter, int wave, Family family) {
  const ExamRecord* ego_now = panel.exam(fp, wave);
  const ExamRecord* ego_prev = panel.exam(fp, wave - 1);
  const ExamRecord* alt_now = panel.exam(alter, wave);
  const ExamRecord* alt_prev = panel.exam(alter, wave - 1);
  if (!ego_now || !ego_prev || !alt_now || !alt_prev) {
    throw std::logic_error("build_design: missing exam for pair (" + fp + ", " + alter +
                           ") at wave " + std::to_string(wave) +
                           "; the tie set contract was violated");
  }
  const PersonRecord* ego = panel.person(fp);

  DesignRow row;
  row.response = ego_now->trait;
  row.alter_current = alt_now->trait;
  row.alter_lagged = alt_prev->trait;
  row.ego_lagged = ego_prev->trait;
  if (family == Family::LogitBinary) {
    if (wave >= 3) row.wave_dummies[wave - 3] = 1.0;
  } else {
    // the linear (count) variant keeps only the wave-7 indicator
    if (wave == 7) row.wave_dummies[4] = 1.0;
  }
  row.age = ego_now->age_years;
  row.female = ego->female ? 1.0 : 0.0;
  row.education = ego_now->education_years;
  row.cluster = fp;
  row.fp_id = fp;
  row.alter_id = alter;
  row.wave = wave;
  return row;
}

DesignMatrix build_design(const CohortPanel& panel, const TieSet& ties) {
  DesignMatrix design;
  design.family =
      panel.trait_kind() == TraitKind::Binary ? Family::LogitBinary : Family::LinearCount;
  design.rows.reserve(ties.pairs.size());
  for (const auto& [fp, alter] : ties.pairs) {
    design.rows.push_back(make_row(panel, fp, alter, ties.wave, design.family));
  }
  return design;
}

DesignMatrix build_design(const CohortPanel& panel, std::span<const TieSet> tie_sets) {
  DesignMatrix design;
  design.family =
      panel.trait_kind() == TraitKind::Binary ? Family::LogitBinary : Family::LinearCount;
  for (const TieSet& ts : tie_sets) {
    for (const auto& [fp, alter] : ts.pairs) {
      design.rows.push_back(make_row(panel, fp, alter, ts.wave, design.family));
    }
  }
  return design;
}

double linear_predictor(const ModelParams& p, const DesignRow& row) {
  double eta = p.alpha;
  eta += p.beta1 * row.alter_current;
  eta += p.beta2 * row.alter_lagged;
  eta += p.beta3 * row.ego_lagged;
  for (int i = 0; i < 5; ++i) eta += p.gamma[i] * row.wave_dummies[i];
  eta += p.delta1 * row.age;
  eta += p.delta2 * row.female;
  eta += p.delta3 * row.education;
  return eta;
}

DesignRow mean_covariate_row(const DesignMatrix& design) {
  if (design.rows.empty()) {
    throw std::invalid_argument("mean_covariate_row: empty design");
  }
  const double n = static_cast<double>(design.rows.size());
  DesignRow mean;
  for (const DesignRow& r : design.rows) {
    mean.alter_current += r.alter_current;
    mean.alter_lagged += r.alter_lagged;
    mean.ego_lagged += r.ego_lagged;
    for (int i = 0; i < 5; ++i) mean.wave_dummies[i] += r.wave_dummies[i];
    mean.age += r.age;
    mean.female += r.female;
    mean.education += r.education;
  }
  mean.alter_current /= n;
  mean.alter_lagged /= n;
  mean.ego_lagged /= n;
  for (int i = 0; i < 5; ++i) mean.wave_dummies[i] /= n;
  mean.age /= n;
  mean.female /= n;
  mean.education /= n;
  return mean;
}

std::string design_to_csv(const DesignMatrix& design) {
  std::string out =
      "fp_id,alter_id,wave,cluster,response,alter_current,alter_lagged,ego_lagged,"
      "wave3,wave4,wave5,wave6,wave7,age,female,education\n";
  for (const DesignRow& r : design.rows) {
    out += r.fp_id + "," + r.alter_id + "," + std::to_string(r.wave) + "," + r.cluster + "," +
           format_double(r.response) + "," + format_double(r.alter_current) + "," +
           format_double(r.alter_lagged) + "," + format_double(r.ego_lagged);
    for (int i = 0; i < 5; ++i) out += "," + format_double(r.wave_dummies[i]);
    out += "," + format_double(r.age) + "," + format_double(r.female) + "," +
           format_double(r.education) + "\n";
  }
  return out;
}

}  // namespace netinf
