#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netinf/design.hpp"
#include "netinf/gee.hpp"

namespace netinf {

// A published estimate: either coefficient + SE, or a percent effect with a
// reported interval. Exactly one representation is populated; percent-scale
// records never get a manufactured SE.
struct EstimateRecord {
  std::string label;
  std::optional<double> coef;
  std::optional<double> se;
  std::optional<double> percent;
  std::optional<Interval> ci;

  bool is_coef() const { return coef.has_value() && se.has_value(); }
  bool is_percent() const { return percent.has_value() && ci.has_value(); }
  double point() const { return is_coef() ? *coef : *percent; }
  // coefficient records: Wald interval at the level; percent records: as reported
  Interval interval(double level) const;

  static EstimateRecord from_coef(std::string label, double coef, double se);
  static EstimateRecord from_percent(std::string label, double percent, double lo, double hi);
};

struct ComparisonVerdict {
  bool overlap = false;      // the two intervals intersect
  bool e1_in_ci2 = false;    // first point estimate inside the second interval
  bool e2_in_ci1 = false;
  std::optional<double> z;   // naive difference z-score (coefficient records only)
  std::optional<double> p;   // two-sided
  // true only when the intervals are disjoint (which implies a significant
  // naive z); overlapping intervals never license a claimed difference
  bool distinguishable = false;
  std::string caveat;
};

// Can the two estimates be told apart at the level? Interval overlap and
// mutual point-in-interval checks always; the naive z assumes independent
// estimates from a joint valid model, which is not available here, so the
// verdict carries a standing caveat.
ComparisonVerdict compare(const EstimateRecord& e1, const EstimateRecord& e2,
                          double level = 0.95);

struct AuditOptions {
  double level = 0.95;
  // "not close to zero" for single-record audits: interval excludes zero, or
  // |interval.lo| exceeds this fraction of |point estimate|
  double near_zero_fraction = 0.10;
};

struct PairAudit {
  std::string label1, label2;
  ComparisonVerdict verdict;
  // first estimate significant, second not, yet the pair is not
  // distinguishable: treating the second as zero is unsupported
  bool treated_insignificant_as_zero = false;
  bool engulfing_ci = false;  // second interval contains the first entirely
};

struct SingleAudit {
  std::string label;
  Interval ci{};
  bool ci_excludes_zero = false;
  bool not_close_to_zero = false;  // unsafe to treat the estimate as zero
};

std::vector<PairAudit> audit_table(
    const std::vector<std::pair<EstimateRecord, EstimateRecord>>& pairs,
    const AuditOptions& options = {});

SingleAudit audit_single(const EstimateRecord& record, const AuditOptions& options = {});

struct NoValidBaseline : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RiskIncrease {
  double percent = 0.0;       // 100 * (relative risk - 1)
  Interval percent_ci{};      // from sweeping beta1 over its Wald interval
  double baseline_prob = 0.0; // fitted probability at mean covariates, alter trait 0
  double exposed_prob = 0.0;  // same with alter trait 1
};

// Coefficient-to-percent translation at mean covariates: relative risk of the
// response when the alter's current trait moves 0 -> 1, all other covariates
// at their column means. Logistic fits only.
RiskIncrease risk_increase(const ModelParams& params, double beta1_se,
                           const DesignMatrix& design, double level = 0.95);
RiskIncrease risk_increase(const FitResult& fit, const DesignMatrix& design,
                           double level = 0.95);

// The unique baseline probability at which a log-odds shift of beta1 yields
// the target relative risk. Throws NoValidBaseline when target_rr >= exp(beta1):
// the relative risk can never reach the odds ratio.
double invert_baseline(double beta1, double target_rr);

struct LagSumDiagnostic {
  double sum = 0.0;  // beta1_hat + beta2_hat
  double se = 0.0;   // sqrt(se1^2 + se2^2), naive independence
  bool opposite_signs = false;
  std::string interpretation;
};

// If the lagged alter term controlled for friend selection, the current and
// lagged coefficients would not cancel; opposite signs summing to about zero
// mean the "control" amplifies rather than subtracts.
LagSumDiagnostic lag_sum_diagnostic(const FitResult& fit);

}  // namespace netinf
