#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netinf/design.hpp"

namespace netinf {

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SeparationError : FitError {
  std::string column;
  explicit SeparationError(std::string col)
      : FitError("perfect separation detected: coefficient on '" + col + "' is diverging"),
        column(std::move(col)) {}
};

struct CollinearityError : FitError {
  std::vector<std::string> columns;
  explicit CollinearityError(std::vector<std::string> cols)
      : FitError(make_message(cols)), columns(std::move(cols)) {}

 private:
  static std::string make_message(const std::vector<std::string>& cols) {
    std::string msg = "collinear design; dependent column(s):";
    for (const auto& c : cols) msg += " '" + c + "'";
    return msg;
  }
};

struct FitOptions {
  double tol = 1e-8;            // on the max absolute score component
  int max_iter = 100;
  // multiply the robust variance by g/(g-1); off by default
  bool cluster_correction = false;
  // optional starting value for the logistic solver (defaults to zero)
  std::optional<Eigen::VectorXd> start;
};

// Result of a fit on an explicit design matrix. Point estimates for the
// independence working correlation equal the pooled GLM fit; robust standard
// errors come from the cluster sandwich.
struct GlmFit {
  Family family = Family::LogitBinary;
  std::vector<std::string> terms;
  Eigen::VectorXd estimates;
  Eigen::VectorXd robust_se;
  Eigen::VectorXd naive_se;
  int n_rows = 0;
  int n_clusters = 0;
  int iterations = 0;
  bool converged = false;
  double max_score_norm = 0.0;

  double estimate(const std::string& term) const;
  double robust(const std::string& term) const;
};

// Pooled GLM with cluster-robust variance on an arbitrary design.  Rows are
// re-ordered internally into a canonical order, so the result is invariant
// under input row permutation, bit for bit.
GlmFit fit_glm(const Eigen::MatrixXd& X, const std::vector<std::string>& terms,
               const Eigen::VectorXd& y, const std::vector<std::string>& clusters,
               Family family, const FitOptions& options = {});

// Tie-level fit in the fixed covariate layout. Wave-indicator columns that
// are identically zero (waves absent from the data) are dropped before
// fitting and reported in dropped_terms; their coefficients read as zero.
struct FitResult {
  ModelParams params;
  GlmFit glm;
  std::vector<std::string> dropped_terms;
};

FitResult fit_logistic_gee(const DesignMatrix& design, const FitOptions& options = {});
FitResult fit_linear_gee(const DesignMatrix& design, const FitOptions& options = {});

// Fitted probability for a row; logistic fits only. The result is clamped
// into the open interval (0, 1): a saturated predictor returns the nearest
// representable probability below 1 rather than 1 itself.
double predict_prob(const FitResult& fit, const DesignRow& row);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// estimate +- z(level) * robust_se; level 0.95 gives z = 1.959964.
Interval wald_ci_coef(const FitResult& fit, const std::string& coef, double level = 0.95);

std::string fit_to_json(const FitResult& fit);

}  // namespace netinf
