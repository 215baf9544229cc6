#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netinf/panel.hpp"

namespace netinf {

enum class Family { LogitBinary, LinearCount };

// Coefficients of the tie-level lagged regression:
//   response ~ alpha + beta1*alter_current + beta2*alter_lagged
//            + beta3*ego_lagged + sum_n gamma[n]*wave_dummy(n)
//            + delta1*age + delta2*female + delta3*education
struct ModelParams {
  double alpha = 0.0;
  double beta1 = 0.0;  // alter's current trait
  double beta2 = 0.0;  // alter's lagged trait
  double beta3 = 0.0;  // ego's own lagged trait
  std::array<double, 5> gamma{};  // wave indicators, waves 3..7
  double delta1 = 0.0;  // age
  double delta2 = 0.0;  // female
  double delta3 = 0.0;  // education
};

// One row per (fp, alter, wave) tie. Cluster label is the focal
// participant: all of an FP's rows form one cluster for the robust variance.
struct DesignRow {
  double response = 0.0;
  double alter_current = 0.0;
  double alter_lagged = 0.0;
  double ego_lagged = 0.0;
  std::array<double, 5> wave_dummies{};  // W3..W7; all zero at wave 2
  double age = 0.0;
  double female = 0.0;
  double education = 0.0;
  std::string cluster;  // fp id
  std::string fp_id, alter_id;  // provenance
  int wave = 0;
};

struct DesignMatrix {
  Family family = Family::LogitBinary;
  std::vector<DesignRow> rows;
};

inline constexpr int kNumCoef = 12;

// Column names in fitting order: intercept first, then the covariates in
// DesignRow order.
const std::array<std::string, kNumCoef>& coef_names();

Eigen::VectorXd params_to_vector(const ModelParams& p);
ModelParams params_from_vector(const Eigen::VectorXd& v);

// The row's covariates in fitting order (leading 1 for the intercept).
Eigen::RowVectorXd row_covariates(const DesignRow& row);

// One design row per pair in the tie set. The tie set contract guarantees
// complete exams at the wave and the previous wave; a gap here is an
// internal error. Family follows the panel's trait kind.
DesignMatrix build_design(const CohortPanel& panel, const TieSet& ties);
DesignMatrix build_design(const CohortPanel& panel, std::span<const TieSet> tie_sets);

// Right-hand side of the model equation at the row.
double linear_predictor(const ModelParams& params, const DesignRow& row);

// Covariate columns replaced by their column means (the female column may be
// fractional); response and provenance cleared.
DesignRow mean_covariate_row(const DesignMatrix& design);

std::string design_to_csv(const DesignMatrix& design);

}  // namespace netinf
