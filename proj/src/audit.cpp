#include "netinf/audit.hpp"

#include <cmath>

#include "netinf/stats.hpp"

namespace netinf {

EstimateRecord EstimateRecord::from_coef(std::string label, double coef, double se) {
  if (se <= 0.0) throw std::invalid_argument("EstimateRecord: se must be positive");
  EstimateRecord r;
  r.label = std::move(label);
  r.coef = coef;
  r.se = se;
  return r;
}

EstimateRecord EstimateRecord::from_percent(std::string label, double percent, double lo,
                                            double hi) {
  if (!(lo <= percent && percent <= hi)) {
    throw std::invalid_argument("EstimateRecord: point estimate must lie inside its interval");
  }
  EstimateRecord r;
  r.label = std::move(label);
  r.percent = percent;
  r.ci = Interval{lo, hi};
  return r;
}

Interval EstimateRecord::interval(double level) const {
  if (is_percent()) return *ci;
  if (is_coef()) {
    const double z = normal_quantile(0.5 + level / 2.0);
    return {*coef - z * *se, *coef + z * *se};
  }
  throw std::invalid_argument("EstimateRecord '" + label + "' has no usable representation");
}

static const char* kCompareCaveat =
    "the naive z-score assumes independent estimates from a joint valid model; "
    "these estimates come from separate models, so the z is at best heuristic";

ComparisonVerdict compare(const EstimateRecord& e1, const EstimateRecord& e2, double level) {
  if (e1.is_coef() != e2.is_coef()) {
    throw std::invalid_argument("compare: mixed representations ('" + e1.label + "' vs '" +
                                e2.label + "'); no conversion between scales is attempted");
  }
  const Interval i1 = e1.interval(level);
  const Interval i2 = e2.interval(level);

  ComparisonVerdict v;
  v.overlap = i1.lo <= i2.hi && i2.lo <= i1.hi;
  v.e1_in_ci2 = i2.lo <= e1.point() && e1.point() <= i2.hi;
  v.e2_in_ci1 = i1.lo <= e2.point() && e2.point() <= i1.hi;
  if (e1.is_coef()) {
    const double z = (*e1.coef - *e2.coef) / std::sqrt(*e1.se * *e1.se + *e2.se * *e2.se);
    v.z = z;
    v.p = two_sided_p(z);
  }
  // disjoint intervals imply |z| > z(level), so this is the conservative test
  v.distinguishable = !v.overlap;
  v.caveat = kCompareCaveat;
  return v;
}

std::vector<PairAudit> audit_table(
    const std::vector<std::pair<EstimateRecord, EstimateRecord>>& pairs,
    const AuditOptions& options) {
  std::vector<PairAudit> out;
  out.reserve(pairs.size());
  for (const auto& [e1, e2] : pairs) {
    PairAudit a;
    a.label1 = e1.label;
    a.label2 = e2.label;
    a.verdict = compare(e1, e2, options.level);
    const Interval i1 = e1.interval(options.level);
    const Interval i2 = e2.interval(options.level);
    const bool sig1 = i1.lo > 0.0 || i1.hi < 0.0;
    const bool sig2 = i2.lo > 0.0 || i2.hi < 0.0;
    a.treated_insignificant_as_zero = sig1 && !sig2 && !a.verdict.distinguishable;
    // strict containment: an interval does not engulf its identical twin
    a.engulfing_ci =
        i2.lo <= i1.lo && i1.hi <= i2.hi && (i2.lo < i1.lo || i1.hi < i2.hi);
    out.push_back(std::move(a));
  }
  return out;
}

SingleAudit audit_single(const EstimateRecord& record, const AuditOptions& options) {
  SingleAudit a;
  a.label = record.label;
  a.ci = record.interval(options.level);
  a.ci_excludes_zero = a.ci.lo > 0.0 || a.ci.hi < 0.0;
  a.not_close_to_zero =
      a.ci_excludes_zero ||
      std::fabs(a.ci.lo) > options.near_zero_fraction * std::fabs(record.point());
  return a;
}

RiskIncrease risk_increase(const ModelParams& params, double beta1_se,
                           const DesignMatrix& design, double level) {
  if (design.family != Family::LogitBinary) {
    throw std::invalid_argument("risk_increase: requires a logistic-family design");
  }
  DesignRow mean = mean_covariate_row(design);

  auto rr_at = [&](double beta1) {
    ModelParams p = params;
    p.beta1 = beta1;
    mean.alter_current = 0.0;
    const double p0 = logistic(linear_predictor(p, mean));
    mean.alter_current = 1.0;
    const double p1 = logistic(linear_predictor(p, mean));
    return std::make_pair(p0, p1);
  };

  const auto [p0, p1] = rr_at(params.beta1);
  RiskIncrease r;
  r.baseline_prob = p0;
  r.exposed_prob = p1;
  r.percent = 100.0 * (p1 / p0 - 1.0);

  // interval by sweeping beta1 over its Wald interval, everything else fixed;
  // the relative risk is increasing in beta1, so the endpoints map directly
  const double z = level == 0.0 ? 0.0 : normal_quantile(0.5 + level / 2.0);
  const auto [lo0, lo1] = rr_at(params.beta1 - z * beta1_se);
  const auto [hi0, hi1] = rr_at(params.beta1 + z * beta1_se);
  r.percent_ci = {100.0 * (lo1 / lo0 - 1.0), 100.0 * (hi1 / hi0 - 1.0)};
  return r;
}

RiskIncrease risk_increase(const FitResult& fit, const DesignMatrix& design, double level) {
  return risk_increase(fit.params, fit.glm.robust("alter_current"), design, level);
}

double invert_baseline(double beta1, double target_rr) {
  if (beta1 <= 0.0) throw std::invalid_argument("invert_baseline: beta1 must be positive");
  if (target_rr <= 1.0) throw std::invalid_argument("invert_baseline: target_rr must exceed 1");
  // RR(p0) = (1 + u) / (1 + u e^{-beta1}) with u = (1 - p0)/p0 rises from 1
  // (p0 -> 1) to e^{beta1} (p0 -> 0); a relative risk at or above the odds
  // ratio is unreachable for any baseline.
  if (target_rr >= std::exp(beta1)) {
    throw NoValidBaseline("invert_baseline: target relative risk " + std::to_string(target_rr) +
                          " >= exp(beta1) = " + std::to_string(std::exp(beta1)) +
                          "; no baseline probability attains it");
  }
  const double u = (target_rr - 1.0) / (1.0 - target_rr * std::exp(-beta1));
  return 1.0 / (1.0 + u);
}

LagSumDiagnostic lag_sum_diagnostic(const FitResult& fit) {
  if (!fit.glm.converged) throw FitError("lag_sum_diagnostic: fit did not converge");
  const double b1 = fit.glm.estimate("alter_current");
  const double b2 = fit.glm.estimate("alter_lagged");
  const double se1 = fit.glm.robust("alter_current");
  const double se2 = fit.glm.robust("alter_lagged");

  LagSumDiagnostic d;
  d.sum = b1 + b2;
  d.se = std::sqrt(se1 * se1 + se2 * se2);
  d.opposite_signs = b1 * b2 < 0.0;
  if (d.opposite_signs) {
    d.interpretation =
        "current and lagged alter coefficients have opposite signs: the lagged "
        "term is not subtracting a selection effect, it is amplifying one";
  } else {
    d.interpretation =
        "current and lagged alter coefficients share a sign; their sum measures "
        "the combined alter association";
  }
  return d;
}

}  // namespace netinf
