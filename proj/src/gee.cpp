#include "netinf/gee.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "netinf/stats.hpp"

namespace netinf {

double GlmFit::estimate(const std::string& term) const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] == term) return estimates[static_cast<Eigen::Index>(i)];
  }
  throw FitError("unknown coefficient name '" + term + "'");
}

double GlmFit::robust(const std::string& term) const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] == term) return robust_se[static_cast<Eigen::Index>(i)];
  }
  throw FitError("unknown coefficient name '" + term + "'");
}

namespace {

constexpr double kSeparationBound = 30.0;

// Canonical row order: by cluster id, then by (y, covariates). Makes the
// accumulation order, and hence the result, independent of input order.
std::vector<Eigen::Index> canonical_order(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                          const std::vector<std::string>& clusters) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(X.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (clusters[a] != clusters[b]) return clusters[a] < clusters[b];
    if (y[a] != y[b]) return y[a] < y[b];
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (X(a, j) != X(b, j)) return X(a, j) < X(b, j);
    }
    return false;
  });
  return idx;
}

void check_rank(const Eigen::MatrixXd& X, const std::vector<std::string>& terms) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  if (rank < X.cols()) {
    const auto& perm = qr.colsPermutation().indices();
    std::vector<std::string> dependent;
    for (Eigen::Index k = rank; k < X.cols(); ++k) {
      dependent.push_back(terms[static_cast<std::size_t>(perm[k])]);
    }
    std::sort(dependent.begin(), dependent.end());
    throw CollinearityError(std::move(dependent));
  }
}

// Cluster sandwich: bread^{-1} (sum_g s_g s_g') bread^{-1}, where s_g sums
// the per-row score contributions x_i * r_i within cluster g. With singleton
// clusters this reduces to the HC0 heteroskedasticity-robust estimator.
Eigen::MatrixXd sandwich(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid,
                         const std::vector<std::string>& clusters,
                         const Eigen::MatrixXd& bread_inv, bool correction, int* n_clusters_out) {
  const Eigen::Index p = X.cols();
  std::map<std::string, Eigen::VectorXd> scores;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    auto [it, inserted] = scores.try_emplace(clusters[static_cast<std::size_t>(i)],
                                             Eigen::VectorXd::Zero(p));
    it->second += X.row(i).transpose() * resid[i];
  }
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
  for (const auto& [label, s] : scores) meat += s * s.transpose();
  const int g = static_cast<int>(scores.size());
  if (n_clusters_out) *n_clusters_out = g;
  Eigen::MatrixXd v = bread_inv * meat * bread_inv;
  if (correction && g > 1) v *= static_cast<double>(g) / static_cast<double>(g - 1);
  return v;
}

GlmFit fit_logistic(const Eigen::MatrixXd& X, const std::vector<std::string>& terms,
                    const Eigen::VectorXd& y, const std::vector<std::string>& clusters,
                    const FitOptions& opt) {
  const Eigen::Index n = X.rows(), p = X.cols();
  GlmFit fit;
  fit.family = Family::LogitBinary;
  fit.terms = terms;
  fit.n_rows = static_cast<int>(n);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (opt.start) {
    if (opt.start->size() != p) throw FitError("start vector has wrong length");
    beta = *opt.start;
  }

  Eigen::VectorXd mu(n), w(n);
  Eigen::MatrixXd info(p, p);
  double snorm = 0.0;
  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    const Eigen::VectorXd eta = X * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      mu[i] = logistic(eta[i]);
      w[i] = mu[i] * (1.0 - mu[i]);
    }
    const Eigen::VectorXd score = X.transpose() * (y - mu);
    snorm = score.lpNorm<Eigen::Infinity>();
    if (snorm < opt.tol) {
      fit.converged = true;
      break;
    }
    info = X.transpose() * w.asDiagonal() * X;
    const Eigen::VectorXd step = info.ldlt().solve(score);
    beta += step;
    Eigen::Index worst;
    if (beta.cwiseAbs().maxCoeff(&worst) > kSeparationBound) {
      throw SeparationError(terms[static_cast<std::size_t>(worst)]);
    }
  }
  fit.iterations = iter;
  fit.max_score_norm = snorm;

  // variance at the final estimates
  const Eigen::VectorXd eta = X * beta;
  Eigen::VectorXd resid(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mu[i] = logistic(eta[i]);
    w[i] = mu[i] * (1.0 - mu[i]);
    resid[i] = y[i] - mu[i];
  }
  info = X.transpose() * w.asDiagonal() * X;
  const Eigen::MatrixXd bread_inv = info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd vrobust =
      sandwich(X, resid, clusters, bread_inv, opt.cluster_correction, &fit.n_clusters);

  fit.estimates = beta;
  fit.naive_se = bread_inv.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.robust_se = vrobust.diagonal().cwiseMax(0.0).cwiseSqrt();
  return fit;
}

GlmFit fit_linear(const Eigen::MatrixXd& X, const std::vector<std::string>& terms,
                  const Eigen::VectorXd& y, const std::vector<std::string>& clusters,
                  const FitOptions& opt) {
  const Eigen::Index n = X.rows(), p = X.cols();
  GlmFit fit;
  fit.family = Family::LinearCount;
  fit.terms = terms;
  fit.n_rows = static_cast<int>(n);

  const Eigen::MatrixXd xtx = X.transpose() * X;
  const Eigen::VectorXd beta = xtx.ldlt().solve(X.transpose() * y);
  const Eigen::VectorXd resid = y - X * beta;
  fit.converged = true;
  fit.iterations = 1;
  fit.max_score_norm = (X.transpose() * resid).lpNorm<Eigen::Infinity>();

  const Eigen::MatrixXd bread_inv = xtx.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  const double dof = static_cast<double>(n - p);
  const double sigma2 = dof > 0 ? resid.squaredNorm() / dof : 0.0;
  const Eigen::MatrixXd vrobust =
      sandwich(X, resid, clusters, bread_inv, opt.cluster_correction, &fit.n_clusters);

  fit.estimates = beta;
  fit.naive_se = (sigma2 * bread_inv.diagonal()).cwiseMax(0.0).cwiseSqrt();
  fit.robust_se = vrobust.diagonal().cwiseMax(0.0).cwiseSqrt();
  return fit;
}

}  // namespace

GlmFit fit_glm(const Eigen::MatrixXd& X, const std::vector<std::string>& terms,
               const Eigen::VectorXd& y, const std::vector<std::string>& clusters,
               Family family, const FitOptions& options) {
  if (X.rows() == 0) throw FitError("empty design");
  if (X.rows() != y.size() || static_cast<std::size_t>(X.rows()) != clusters.size()) {
    throw FitError("design, response, and cluster sizes disagree");
  }
  if (static_cast<std::size_t>(X.cols()) != terms.size()) {
    throw FitError("term names do not match design width");
  }
  if (family == Family::LogitBinary) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0) throw FitError("logistic response must be 0/1");
    }
  }

  const auto order = canonical_order(X, y, clusters);
  Eigen::MatrixXd xs(X.rows(), X.cols());
  Eigen::VectorXd ys(y.size());
  std::vector<std::string> cs(clusters.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    xs.row(static_cast<Eigen::Index>(i)) = X.row(order[i]);
    ys[static_cast<Eigen::Index>(i)] = y[order[i]];
    cs[i] = clusters[static_cast<std::size_t>(order[i])];
  }

  check_rank(xs, terms);
  return family == Family::LogitBinary ? fit_logistic(xs, terms, ys, cs, options)
                                       : fit_linear(xs, terms, ys, cs, options);
}

namespace {

FitResult fit_design(const DesignMatrix& design, const FitOptions& options, Family family) {
  if (design.rows.empty()) throw FitError("empty design");
  const Eigen::Index n = static_cast<Eigen::Index>(design.rows.size());
  Eigen::MatrixXd full(n, kNumCoef);
  Eigen::VectorXd y(n);
  std::vector<std::string> clusters(design.rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const DesignRow& r = design.rows[static_cast<std::size_t>(i)];
    full.row(i) = row_covariates(r);
    y[i] = r.response;
    clusters[static_cast<std::size_t>(i)] = r.cluster;
  }

  // structurally absent columns (all zero, e.g. wave dummies for waves the
  // data never reaches) are unidentifiable; drop them rather than erroring
  FitResult result;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < kNumCoef; ++j) {
    if (full.col(j).cwiseAbs().maxCoeff() > 0.0) {
      keep.push_back(j);
    } else {
      result.dropped_terms.push_back(coef_names()[static_cast<std::size_t>(j)]);
    }
  }
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(keep.size()));
  std::vector<std::string> terms;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    X.col(static_cast<Eigen::Index>(k)) = full.col(keep[k]);
    terms.push_back(coef_names()[static_cast<std::size_t>(keep[k])]);
  }

  result.glm = fit_glm(X, terms, y, clusters, family, options);

  Eigen::VectorXd padded = Eigen::VectorXd::Zero(kNumCoef);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    padded[keep[k]] = result.glm.estimates[static_cast<Eigen::Index>(k)];
  }
  result.params = params_from_vector(padded);
  return result;
}

}  // namespace

FitResult fit_logistic_gee(const DesignMatrix& design, const FitOptions& options) {
  if (design.family != Family::LogitBinary) {
    throw FitError("fit_logistic_gee requires a binary-response design");
  }
  return fit_design(design, options, Family::LogitBinary);
}

FitResult fit_linear_gee(const DesignMatrix& design, const FitOptions& options) {
  if (design.family != Family::LinearCount) {
    throw FitError("fit_linear_gee requires a count-response design");
  }
  return fit_design(design, options, Family::LinearCount);
}

double predict_prob(const FitResult& fit, const DesignRow& row) {
  if (fit.glm.family != Family::LogitBinary) {
    throw FitError("predict_prob requires a logistic fit");
  }
  const double p = logistic(linear_predictor(fit.params, row));
  const double hi = std::nextafter(1.0, 0.0);
  const double lo = std::nextafter(0.0, 1.0);
  return std::min(std::max(p, lo), hi);
}

Interval wald_ci_coef(const FitResult& fit, const std::string& coef, double level) {
  if (!fit.glm.converged) throw FitError("wald_ci_coef: fit did not converge");
  if (level < 0.0 || level >= 1.0) throw FitError("wald_ci_coef: level must be in [0, 1)");
  const double est = fit.glm.estimate(coef);
  const double se = fit.glm.robust(coef);
  const double z = level == 0.0 ? 0.0 : normal_quantile(0.5 + level / 2.0);
  return {est - z * se, est + z * se};
}

std::string fit_to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["family"] = fit.glm.family == Family::LogitBinary ? "logit_binary" : "linear_count";
  nlohmann::ordered_json coefs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < fit.glm.terms.size(); ++i) {
    coefs.push_back({{"name", fit.glm.terms[i]},
                     {"estimate", fit.glm.estimates[static_cast<Eigen::Index>(i)]},
                     {"robust_se", fit.glm.robust_se[static_cast<Eigen::Index>(i)]},
                     {"naive_se", fit.glm.naive_se[static_cast<Eigen::Index>(i)]}});
  }
  j["coefficients"] = coefs;
  j["dropped_terms"] = fit.dropped_terms;
  j["convergence"] = {{"converged", fit.glm.converged},
                      {"iterations", fit.glm.iterations},
                      {"max_score_norm", fit.glm.max_score_norm},
                      {"n_rows", fit.glm.n_rows},
                      {"n_clusters", fit.glm.n_clusters}};
  return j.dump(2) + "\n";
}

}  // namespace netinf
