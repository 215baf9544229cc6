#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netinf/design.hpp"

namespace netinf {

// Per-person values entering a model row: own lagged trait plus covariates.
struct PersonContext {
  double lagged = 0.0;
  double age = 0.0;
  double female = 0.0;
  double education = 0.0;
};

// Two-tie chain (i,k),(k,m) with m != i: the (i,k) equation models ego i
// with alter k, the (k,m) equation models ego k with alter m. Everything
// other than the current traits of i and k is held fixed.
struct ChainConfig {
  PersonContext ego_i;
  PersonContext ego_k;          // ego_k.lagged doubles as i's alter-lag
  double alter_m_current = 0.0;
  double alter_m_lagged = 0.0;
  int wave = 2;
};

// Evaluates the two decompositions of the joint log odds of (Y_i, Y_k) via
// the model equation and returns their difference. The four context-laden
// predictors cancel term by term, so the difference equals beta1 for every
// parameter vector and context; a nonzero beta1 is therefore a
// self-contradiction of the simultaneous-equation system.
double cyclic_identity_residual(const ModelParams& params, const ChainConfig& config);

// Brute-force form of the same check: searches joint distributions on the
// four outcomes (Y_i, Y_k) in {0,1}^2 for one whose conditional log odds
// reproduce the model-specified ones, and returns the best achievable
// max-abs deviation. Zero (to search tolerance) iff beta1 = 0. The search
// walks a simplex grid of the given resolution and then refines locally;
// it deliberately avoids the cancellation algebra it is checking.
double joint_compatibility_gap(const ModelParams& params, const ChainConfig& config, int grid);

struct MultinamingViolation {
  std::string fp_id;
  int wave = 0;
  int n_alters = 0;
  double spread = 0.0;  // max minus min of beta1*Y_jt + beta2*Y_j,t-1 over alters
};

struct ViolationReport {
  int groups_total = 0;        // distinct (fp, wave) groups in the design
  int groups_multi_alter = 0;  // groups with two or more alters
  int violation_count = 0;
  std::vector<MultinamingViolation> witnesses;  // capped at 100
};

// When an FP names several alters at one wave, the model forces
// beta1*Y_{j,t} + beta2*Y_{j,t-1} to agree across the named alters. Reports
// every (fp, wave) group whose spread exceeds tol. With params (beta1=1,
// beta2=0) the report counts groups whose alters differ in current trait:
// raw data-level witnesses of the constraint.
ViolationReport multinaming_violations(const DesignMatrix& design, const ModelParams& params,
                                       double tol);

// Reciprocal pattern (i,j),(j,i),(j,k),(k,j) with k != i for the linear
// model variant.
struct ReciprocalConfig {
  PersonContext ego_i;
  PersonContext ego_j;
  PersonContext ego_k;
  int wave = 6;
};

struct ConsistencyReport {
  double residual_norm = 0.0;  // least-squares residual of the 4x3 system
  int rank = 0;
  bool consistent = false;     // residual below 1e-10
  Eigen::Vector3d solution{};  // least-squares conditional expectations for i, j, k
};

struct SingularConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conditional expectations given time t-1 of the four tie equations yield
// four linear equations in the three unknowns E[Y_m,t | t-1]. Returns the
// least-squares residual; a nonzero residual for some lag configuration
// witnesses the overdetermination. Throws SingularConfigError when
// |beta1| = 1 (the reciprocal-pair subsystem degenerates).
ConsistencyReport linear_overdetermination(const ModelParams& params,
                                           const ReciprocalConfig& config);

}  // namespace netinf
