#include "netinf/consistency.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

namespace netinf {

namespace {

DesignRow context_row(const PersonContext& ego, double alter_current, double alter_lagged,
                      int wave, Family family = Family::LogitBinary) {
  DesignRow row;
  row.alter_current = alter_current;
  row.alter_lagged = alter_lagged;
  row.ego_lagged = ego.lagged;
  if (family == Family::LogitBinary) {
    if (wave >= 3 && wave <= 7) row.wave_dummies[wave - 3] = 1.0;
  } else {
    if (wave == 7) row.wave_dummies[4] = 1.0;
  }
  row.age = ego.age;
  row.female = ego.female;
  row.education = ego.education;
  row.wave = wave;
  return row;
}

}  // namespace

double cyclic_identity_residual(const ModelParams& params, const ChainConfig& config) {
  // log odds of Y_i from the (i,k) equation, at both values of Y_k
  const double eta_i_k1 =
      linear_predictor(params, context_row(config.ego_i, 1.0, config.ego_k.lagged, config.wave));
  const double eta_i_k0 =
      linear_predictor(params, context_row(config.ego_i, 0.0, config.ego_k.lagged, config.wave));
  // log odds of Y_k from the (k,m) equation; Y_i does not appear in it, so
  // the value is the same whether we condition on Y_i = 1 or Y_i = 0
  const double eta_k = linear_predictor(
      params,
      context_row(config.ego_k, config.alter_m_current, config.alter_m_lagged, config.wave));

  const double lhs = eta_i_k1 + eta_k;  // P[Y_i | Y_k=1] route, then P[Y_k | Y_i=0]
  const double rhs = eta_k + eta_i_k0;  // P[Y_k | Y_i=1] route, then P[Y_i | Y_k=0]
  return lhs - rhs;
}

namespace {

struct GapObjective {
  // model-specified conditional log odds
  double t_i1, t_i0, t_k1, t_k0;

  // p = (p00, p01, p10, p11) indexed as p[2*yi + yk]
  double operator()(const Eigen::Vector4d& p) const {
    const double p00 = p[0], p01 = p[1], p10 = p[2], p11 = p[3];
    if (p00 <= 0.0 || p01 <= 0.0 || p10 <= 0.0 || p11 <= 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    const double d1 = std::log(p11 / p01) - t_i1;  // log odds Y_i | Y_k=1
    const double d2 = std::log(p10 / p00) - t_i0;  // log odds Y_i | Y_k=0
    const double d3 = std::log(p11 / p10) - t_k1;  // log odds Y_k | Y_i=1
    const double d4 = std::log(p01 / p00) - t_k0;  // log odds Y_k | Y_i=0
    return std::max(std::max(std::fabs(d1), std::fabs(d2)),
                    std::max(std::fabs(d3), std::fabs(d4)));
  }

  double eval_soft(const Eigen::Vector3d& z) const { return (*this)(softmax(z)); }

  static Eigen::Vector4d softmax(const Eigen::Vector3d& z) {
    Eigen::Vector4d e;
    const double m = std::max(0.0, z.maxCoeff());
    e << std::exp(-m), std::exp(z[0] - m), std::exp(z[1] - m), std::exp(z[2] - m);
    return e / e.sum();
  }
};

// Nelder-Mead on the 3-dim softmax parameterization of the simplex;
// returns (best value, best point).
std::pair<double, Eigen::Vector3d> nelder_mead(const GapObjective& f, Eigen::Vector3d start,
                                               int max_iter) {
  constexpr int n = 3;
  std::array<Eigen::Vector3d, n + 1> pts;
  std::array<double, n + 1> val;
  pts[0] = start;
  for (int i = 0; i < n; ++i) {
    pts[i + 1] = start;
    pts[i + 1][i] += 0.5;
  }
  for (int i = 0; i <= n; ++i) val[i] = f.eval_soft(pts[i]);

  auto order = [&]() {
    std::array<int, n + 1> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return val[a] < val[b]; });
    std::array<Eigen::Vector3d, n + 1> p2;
    std::array<double, n + 1> v2;
    for (int i = 0; i <= n; ++i) {
      p2[i] = pts[idx[i]];
      v2[i] = val[idx[i]];
    }
    pts = p2;
    val = v2;
  };

  for (int it = 0; it < max_iter; ++it) {
    order();
    if (val[n] - val[0] < 1e-13 && (pts[n] - pts[0]).norm() < 1e-10) break;
    const Eigen::Vector3d centroid = (pts[0] + pts[1] + pts[2]) / 3.0;
    const Eigen::Vector3d refl = centroid + (centroid - pts[n]);
    const double fr = f.eval_soft(refl);
    if (fr < val[0]) {
      const Eigen::Vector3d exp_pt = centroid + 2.0 * (centroid - pts[n]);
      const double fe = f.eval_soft(exp_pt);
      if (fe < fr) {
        pts[n] = exp_pt;
        val[n] = fe;
      } else {
        pts[n] = refl;
        val[n] = fr;
      }
    } else if (fr < val[n - 1]) {
      pts[n] = refl;
      val[n] = fr;
    } else {
      const Eigen::Vector3d contr = centroid + 0.5 * (pts[n] - centroid);
      const double fc = f.eval_soft(contr);
      if (fc < val[n]) {
        pts[n] = contr;
        val[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          val[i] = f.eval_soft(pts[i]);
        }
      }
    }
  }
  order();
  return {val[0], pts[0]};
}

}  // namespace

double joint_compatibility_gap(const ModelParams& params, const ChainConfig& config, int grid) {
  if (grid < 100) throw std::invalid_argument("joint_compatibility_gap: grid must be >= 100");

  GapObjective f{};
  f.t_i1 =
      linear_predictor(params, context_row(config.ego_i, 1.0, config.ego_k.lagged, config.wave));
  f.t_i0 =
      linear_predictor(params, context_row(config.ego_i, 0.0, config.ego_k.lagged, config.wave));
  const double eta_k = linear_predictor(
      params,
      context_row(config.ego_k, config.alter_m_current, config.alter_m_lagged, config.wave));
  f.t_k1 = eta_k;
  f.t_k0 = eta_k;

  // coarse pass over the probability simplex
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector4d best_p(0.25, 0.25, 0.25, 0.25);
  const int m = grid;
  for (int a = 1; a < m; ++a) {
    for (int b = 1; a + b < m; ++b) {
      for (int c = 1; a + b + c < m; ++c) {
        const int d = m - a - b - c;
        Eigen::Vector4d p(static_cast<double>(a) / m, static_cast<double>(b) / m,
                          static_cast<double>(c) / m, static_cast<double>(d) / m);
        const double v = f(p);
        if (v < best) {
          best = v;
          best_p = p;
        }
      }
    }
  }

  // Local refinement. Two starting points: the best grid point, and the
  // product measure assembled from the target conditionals (the optimum can
  // sit far outside the grid's resolution when covariate terms are large).
  std::vector<Eigen::Vector3d> starts;
  starts.emplace_back(std::log(best_p[1] / best_p[0]), std::log(best_p[2] / best_p[0]),
                      std::log(best_p[3] / best_p[0]));
  starts.emplace_back(f.t_k0, f.t_i0, f.t_i1 + f.t_k0);

  Eigen::Vector3d best_z = starts.front();
  for (const Eigen::Vector3d& z : starts) {
    const auto [v, zmin] = nelder_mead(f, z, 2000);
    if (v < best) {
      best = v;
      best_z = zmin;
    }
  }
  // restart rounds around the incumbent to escape nonsmooth-plateau stalls
  for (int round = 0; round < 6; ++round) {
    const auto [v, zmin] = nelder_mead(f, best_z, 1500);
    if (v < best) {
      best = v;
      best_z = zmin;
    }
  }
  return best;
}

ViolationReport multinaming_violations(const DesignMatrix& design, const ModelParams& params,
                                       double tol) {
  std::map<std::pair<std::string, int>, std::pair<double, double>> spreads;  // (min, max)
  std::map<std::pair<std::string, int>, int> counts;
  for (const DesignRow& row : design.rows) {
    const auto key = std::make_pair(row.fp_id, row.wave);
    const double v = params.beta1 * row.alter_current + params.beta2 * row.alter_lagged;
    auto [it, inserted] = spreads.try_emplace(key, std::make_pair(v, v));
    if (!inserted) {
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
    counts[key] += 1;
  }

  ViolationReport report;
  report.groups_total = static_cast<int>(spreads.size());
  for (const auto& [key, minmax] : spreads) {
    const int n_alters = counts[key];
    if (n_alters < 2) continue;
    report.groups_multi_alter += 1;
    const double spread = minmax.second - minmax.first;
    if (spread > tol) {
      report.violation_count += 1;
      if (report.witnesses.size() < 100) {
        report.witnesses.push_back({key.first, key.second, n_alters, spread});
      }
    }
  }
  return report;
}

ConsistencyReport linear_overdetermination(const ModelParams& params,
                                           const ReciprocalConfig& config) {
  const double b1 = params.beta1;
  if (std::fabs(std::fabs(b1) - 1.0) < 1e-12) {
    throw SingularConfigError(
        "linear_overdetermination: |beta1| = 1 degenerates the reciprocal-pair subsystem");
  }

  // Taking E[. | time t-1] of the linear tie equation for tie (a, b):
  //   x_a - beta1 * x_b = alpha + beta2*lag_b + beta3*lag_a + c_a
  // with x_m = E[Y_m,t | t-1] and c_a the wave/covariate terms of ego a.
  auto rhs = [&](const PersonContext& ego, const PersonContext& alter) {
    DesignRow row = context_row(ego, 0.0, alter.lagged, config.wave, Family::LinearCount);
    return linear_predictor(params, row);
  };

  Eigen::Matrix<double, 4, 3> A;
  A << 1.0, -b1, 0.0,   // tie (i, j)
      -b1, 1.0, 0.0,    // tie (j, i)
      0.0, 1.0, -b1,    // tie (j, k)
      0.0, -b1, 1.0;    // tie (k, j)
  Eigen::Vector4d r;
  r << rhs(config.ego_i, config.ego_j), rhs(config.ego_j, config.ego_i),
      rhs(config.ego_j, config.ego_k), rhs(config.ego_k, config.ego_j);

  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 4, 3>> qr(A);
  qr.setThreshold(1e-10);
  const Eigen::Vector3d x = qr.solve(r);

  ConsistencyReport report;
  report.rank = static_cast<int>(qr.rank());
  report.residual_norm = (A * x - r).norm();
  report.consistent = report.residual_norm < 1e-10;
  report.solution = x;
  return report;
}

}  // namespace netinf
