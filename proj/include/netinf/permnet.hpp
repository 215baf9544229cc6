#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netinf/panel.hpp"

namespace netinf {

struct NotComputable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degree-of-separation association against attribute-permuted networks.
struct DegreeAssociation {
  int degree = 0;
  double observed = 0.0;      // conditional prevalence q_k in the observed network
  double perm_mean = 0.0;     // mean q_k over permutation replicates
  double rel_increase = 0.0;  // observed / perm_mean - 1
  // percentile band: (observed/P97.5 - 1, observed/P2.5 - 1). This is a
  // permutation interval, not a confidence interval: it compares the observed
  // network to attribute-shuffled copies of itself.
  double interval_low = 0.0;
  double interval_high = 0.0;
  long n_pairs = 0;
  int n_perms = 0;
};

struct PermTestOptions {
  int max_k = 3;
  int n_perms = 1000;
  std::uint64_t seed = 0;
  double count_threshold = 3.0;  // count traits dichotomized at >= threshold
  bool directed = false;         // geodesics on the directed graph instead of the merged one
  double alpha = 0.05;           // band spans the central (1 - alpha) replicates
};

// Ordered pairs (i, j) with i a focal participant and geodesic distance
// exactly k in the wave's tie graph (all tie kinds merged; direction ignored
// unless directed is set).
std::vector<std::pair<std::string, std::string>> degree_pairs(const CohortPanel& panel, int wave,
                                                              int k, bool directed = false);

// q_k: among pairs at distance exactly k whose alter has the trait, the
// fraction whose focal participant has it too. Throws NotComputable when no
// pair at distance k has a trait-positive alter.
double degree_association(const CohortPanel& panel, int wave, int k,
                          double count_threshold = 3.0, bool directed = false);

// For each k <= max_k: observed q_k against uniformly re-permuted trait
// assignments (the trait multiset over persons examined at the wave is
// preserved exactly). Degrees where the observed statistic or every
// replicate is not computable are omitted from the result.
std::vector<DegreeAssociation> permutation_test(const CohortPanel& panel, int wave,
                                                const PermTestOptions& options = {});

}  // namespace netinf
