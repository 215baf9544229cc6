#pragma once

#include <string>
#include <utility>
#include <vector>

#include "netinf/audit.hpp"

namespace netinf {

// Published estimates bundled for the audit subcommand. All values are as
// reported in the source studies on obesity, smoking cessation, happiness,
// and loneliness spread; percent records carry the reported 95% intervals,
// coefficient records the reported standard errors.

// Directional friendship-effect estimates: per study, the mutual, ego-named,
// and alter-named rows (where reported). Grouped so that every within-group
// pairwise comparison is meaningful.
struct EstimateGroup {
  std::string name;
  std::vector<EstimateRecord> records;
};
const std::vector<EstimateGroup>& directional_estimates();

// Pairs where the first covariate was reported significant and the second
// not, and the difference was read as real.
const std::vector<std::pair<EstimateRecord, EstimateRecord>>& insignificance_comparison_pairs();

// Single coefficients reported as "no effect" although their intervals say
// otherwise.
const std::vector<EstimateRecord>& treated_as_zero_records();

}  // namespace netinf
