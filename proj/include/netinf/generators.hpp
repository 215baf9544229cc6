#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "netinf/panel.hpp"

namespace netinf {

// Position in the unit ball; carries the latent covariates that drive
// friend selection (and, mechanism permitting, the trait).
struct LatentPosition {
  std::vector<double> coords;
};

enum class Mechanism { Homophily, SharedEnvironment, Induction, Null };

const char* to_string(Mechanism m);
std::optional<Mechanism> mechanism_from_string(std::string_view s);

struct GeneratorConfig {
  Mechanism mechanism = Mechanism::Homophily;
  int n_persons = 1000;
  int n_waves = 3;          // 2..7
  int dim = 10;             // latent / geographic dimension
  double fp_fraction = 0.42;
  double naming_rate = 0.45;    // fraction of FPs who name a friend
  double observability = 0.25;  // fraction of named friendships retained in the data
  double multi_naming_rate = 0.10;  // fraction of namers who list a second friend
  double trait_base_rate = 0.3;
  double persistence = 0.5;         // coefficient on own lagged trait
  double mechanism_strength = 1.0;
  // correlation length of the homophily score field, in ball-radius units;
  // 0 picks the nearest-neighbor spacing, the scale at which friend
  // selection operates
  double score_length = 0.0;
  // fraction of non-FPs who also name a friend (their namings can only be
  // seen from the named FP's side)
  double nonfp_naming_rate = 0.0;
  std::uint64_t seed = 0;
};

struct GroundTruth {
  Mechanism mechanism = Mechanism::Null;
  std::map<std::string, LatentPosition> latent;
  // zero except for the Induction mechanism
  double true_induction_coefficient = 0.0;
};

// Synthetic cohort under one of the rival mechanisms.
//
// Homophily:          traits driven by a fixed smooth random score of the
//                     ego's own latent position, with correlation length at
//                     the friend-selection (nearest-neighbor) scale; no
//                     cross-person term anywhere.
// SharedEnvironment:  positions are geographic; a per-(region, wave) shock
//                     enters the log odds of everyone in the region.
// Induction:          log odds gain mechanism_strength times the mean lagged
//                     trait of the ego's named friends; positions do not
//                     enter the trait process.
// Null:               traits independent of everything.
//
// Friend naming in all mechanisms: a naming_rate fraction of FPs name their
// nearest neighbor in latent space (a multi_naming_rate fraction of namers
// also list their second-nearest, against the one-friend instruction), and
// each named friendship is retained in the recorded tie table with
// probability observability. Named-but-unrecorded friendships still carry
// induction: the recorded network is a sparse subset of the real one.
std::pair<CohortPanel, GroundTruth> gen_cohort(const GeneratorConfig& config);

struct DistanceSamples {
  std::vector<double> mutual;     // one entry per reciprocal pair
  std::vector<double> nonmutual;  // one entry per unreciprocated naming edge
};

// Per replicate: n points uniform in the unit ball, each naming its nearest
// neighbor; distances split by whether the naming was reciprocated.
// Replicates use independent substreams keyed by (seed, replicate).
DistanceSamples nn_ball_experiment(int n, int dim, int replicates, std::uint64_t seed);

struct DominanceReport {
  double min_cdf_gap = 0.0;   // min over the grid of F_mutual - F_nonmutual
  bool dominance_holds = false;
  double mw_statistic = 0.0;  // P(mutual < nonmutual) + 0.5 P(equal)
  double p_value = 1.0;       // one-sided permutation p for mutual < nonmutual
  int n_mutual = 0;
  int n_nonmutual = 0;
};

// Tests whether mutual-pair distances are stochastically smaller than
// non-mutual ones: empirical CDFs compared on a uniform grid, plus a
// one-sided rank statistic with a permutation p-value.
DominanceReport dominance_check(const DistanceSamples& samples, int grid_size,
                                int n_perms = 1000, std::uint64_t seed = 12345);

}  // namespace netinf
