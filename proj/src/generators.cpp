#include "netinf/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "netinf/rng.hpp"
#include "netinf/stats.hpp"

namespace netinf {

const char* to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Homophily: return "homophily";
    case Mechanism::SharedEnvironment: return "shared_environment";
    case Mechanism::Induction: return "induction";
    case Mechanism::Null: return "null";
  }
  return "?";
}

std::optional<Mechanism> mechanism_from_string(std::string_view s) {
  if (s == "homophily") return Mechanism::Homophily;
  if (s == "shared_environment") return Mechanism::SharedEnvironment;
  if (s == "induction") return Mechanism::Induction;
  if (s == "null") return Mechanism::Null;
  return std::nullopt;
}

namespace {

// substream keys, one per independent source of randomness
enum : std::uint64_t {
  kStreamAttrs = 1,
  kStreamPositions = 2,
  kStreamNaming = 3,
  kStreamObservability = 4,
  kStreamTraits = 5,
  kStreamShocks = 6,
  kStreamScore = 7,
};

// Stationary random score field via random Fourier features with a fixed
// frequency magnitude (a shell spectrum): unit variance, isotropic
// correlation that decays to zero near the given length scale. Stationarity
// keeps the score's behavior identical everywhere in the ball, so tie
// classes can differ only through pair distances.
class ScoreField {
 public:
  ScoreField(Rng rng, int dim, double length, int n_features = 192)
      : omega_(static_cast<std::size_t>(n_features)),
        phase_(static_cast<std::size_t>(n_features)) {
    const double magnitude = 2.6 / length;  // correlation knee near d = length
    for (int k = 0; k < n_features; ++k) {
      auto& w = omega_[static_cast<std::size_t>(k)];
      w.resize(static_cast<std::size_t>(dim));
      double norm2 = 0.0;
      for (double& c : w) {
        c = rng.normal();
        norm2 += c * c;
      }
      const double scale = magnitude / std::sqrt(norm2);
      for (double& c : w) c *= scale;
      phase_[static_cast<std::size_t>(k)] = rng.uniform(0.0, 2.0 * M_PI);
    }
  }

  double operator()(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < omega_.size(); ++k) {
      double dot = phase_[k];
      for (std::size_t c = 0; c < x.size(); ++c) dot += omega_[k][c] * x[c];
      s += std::cos(dot);
    }
    return s * std::sqrt(2.0 / static_cast<double>(omega_.size()));
  }

 private:
  std::vector<std::vector<double>> omega_;
  std::vector<double> phase_;
};

std::vector<double> uniform_in_ball(Rng& rng, int dim) {
  std::vector<double> x(static_cast<std::size_t>(dim));
  double norm2 = 0.0;
  for (double& c : x) {
    c = rng.normal();
    norm2 += c * c;
  }
  const double norm = std::sqrt(norm2);
  const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
  for (double& c : x) c = c / norm * radius;
  return x;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// index of the nearest neighbor of i; distance ties broken by smaller index
int nearest_neighbor(const std::vector<std::vector<double>>& pts, int i) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(pts.size()); ++j) {
    if (j == i) continue;
    const double d = sq_dist(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

// two nearest neighbors of i, nearest first
std::pair<int, int> two_nearest(const std::vector<std::vector<double>>& pts, int i) {
  int b1 = -1, b2 = -1;
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(pts.size()); ++j) {
    if (j == i) continue;
    const double d = sq_dist(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
    if (d < d1) {
      d2 = d1;
      b2 = b1;
      d1 = d;
      b1 = j;
    } else if (d < d2) {
      d2 = d;
      b2 = j;
    }
  }
  return {b1, b2};
}

std::string person_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "p%06d", i + 1);
  return buf;
}

// orthant index of a position: one bit per coordinate sign
std::uint64_t region_of(const std::vector<double>& x) {
  std::uint64_t r = 0;
  const std::size_t bits = std::min<std::size_t>(x.size(), 63);
  for (std::size_t k = 0; k < bits; ++k) {
    if (x[k] >= 0.0) r |= (1ULL << k);
  }
  return r;
}

}  // namespace

std::pair<CohortPanel, GroundTruth> gen_cohort(const GeneratorConfig& cfg) {
  if (cfg.n_persons < 2) throw std::invalid_argument("gen_cohort: n_persons must be >= 2");
  if (cfg.n_waves < 2 || cfg.n_waves > 7) {
    throw std::invalid_argument("gen_cohort: n_waves must be in 2..7");
  }
  if (cfg.dim < 1) throw std::invalid_argument("gen_cohort: dim must be >= 1");
  for (double p : {cfg.fp_fraction, cfg.naming_rate, cfg.observability, cfg.multi_naming_rate,
                   cfg.trait_base_rate}) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("gen_cohort: probability out of [0,1]");
  }

  const int n = cfg.n_persons;
  const Rng root(cfg.seed);
  Rng attr_rng = root.stream(kStreamAttrs);
  Rng pos_rng = root.stream(kStreamPositions);
  Rng name_rng = root.stream(kStreamNaming);
  Rng obs_rng = root.stream(kStreamObservability);
  const Rng trait_root = root.stream(kStreamTraits);
  const Rng shock_root = root.stream(kStreamShocks);

  std::vector<PersonRecord> persons(static_cast<std::size_t>(n));
  std::vector<double> education(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    PersonRecord& p = persons[static_cast<std::size_t>(i)];
    p.person_id = person_id(i);
    p.is_fp = attr_rng.bernoulli(cfg.fp_fraction);
    p.female = attr_rng.bernoulli(0.5);
    p.birth_year = attr_rng.uniform_int(1925, 1955);
    education[static_cast<std::size_t>(i)] = attr_rng.uniform_int(8, 20);
  }

  std::vector<std::vector<double>> pos(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(i)] = uniform_in_ball(pos_rng, cfg.dim);

  // Friend naming: FPs name their nearest neighbor (sometimes also the
  // second-nearest); the choice is stable across waves. A named friendship
  // is recorded in the tie table only if it passes the observability draw,
  // but it always participates in the induction dynamics.
  std::vector<std::vector<int>> named(static_cast<std::size_t>(n));   // real namings
  std::vector<std::vector<int>> recorded(static_cast<std::size_t>(n));  // observed subset
  for (int i = 0; i < n; ++i) {
    const double rate =
        persons[static_cast<std::size_t>(i)].is_fp ? cfg.naming_rate : cfg.nonfp_naming_rate;
    if (!name_rng.bernoulli(rate)) continue;
    const auto [nn1, nn2] = two_nearest(pos, i);
    named[static_cast<std::size_t>(i)].push_back(nn1);
    if (nn2 >= 0 && name_rng.bernoulli(cfg.multi_naming_rate)) {
      named[static_cast<std::size_t>(i)].push_back(nn2);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j : named[static_cast<std::size_t>(i)]) {
      if (obs_rng.bernoulli(cfg.observability)) recorded[static_cast<std::size_t>(i)].push_back(j);
    }
  }

  // per-(region, wave) environmental shock, drawn lazily and deterministically
  auto region_shock = [&](std::uint64_t region, int wave) {
    Rng r = shock_root.stream(region * 131 + static_cast<std::uint64_t>(wave));
    return r.normal();
  };

  // homophily score, evaluated once per person; the default length scale is
  // the nearest-neighbor spacing, where friend selection differentiates pairs
  std::vector<double> score(static_cast<std::size_t>(n), 0.0);
  if (cfg.mechanism == Mechanism::Homophily) {
    const double length = cfg.score_length > 0.0
                              ? cfg.score_length
                              : std::pow(1.0 / static_cast<double>(n),
                                         1.0 / static_cast<double>(cfg.dim));
    const ScoreField field(root.stream(kStreamScore), cfg.dim, length);
    for (int i = 0; i < n; ++i) score[static_cast<std::size_t>(i)] = field(pos[static_cast<std::size_t>(i)]);
  }

  const double base_logit = logit(cfg.trait_base_rate);
  std::vector<double> trait_prev(static_cast<std::size_t>(n), 0.0);
  std::vector<double> trait_now(static_cast<std::size_t>(n), 0.0);
  std::vector<ExamRecord> exams;
  exams.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(cfg.n_waves));
  std::vector<TieRecord> ties;

  for (int wave = 1; wave <= cfg.n_waves; ++wave) {
    Rng wave_rng = trait_root.stream(static_cast<std::uint64_t>(wave));
    const int exam_year = 1972 + 3 * (wave - 1);
    for (int i = 0; i < n; ++i) {
      const std::size_t ui = static_cast<std::size_t>(i);
      double eta = base_logit;
      if (wave >= 2) eta += cfg.persistence * trait_prev[ui];
      switch (cfg.mechanism) {
        case Mechanism::Homophily:
          eta += cfg.mechanism_strength * score[ui];
          break;
        case Mechanism::SharedEnvironment:
          eta += cfg.mechanism_strength * region_shock(region_of(pos[ui]), wave);
          break;
        case Mechanism::Induction:
          if (wave >= 2 && !named[ui].empty()) {
            double s = 0.0;
            for (int j : named[ui]) s += trait_prev[static_cast<std::size_t>(j)];
            eta += cfg.mechanism_strength * s / static_cast<double>(named[ui].size());
          }
          break;
        case Mechanism::Null:
          eta = base_logit;  // independent of everything, lag included
          break;
      }
      trait_now[ui] = wave_rng.bernoulli(logistic(eta)) ? 1.0 : 0.0;

      ExamRecord e;
      e.person_id = persons[ui].person_id;
      e.wave = wave;
      e.exam_year = exam_year;
      e.trait = trait_now[ui];
      e.age_years = static_cast<double>(exam_year - persons[ui].birth_year);
      e.education_years = education[ui];
      exams.push_back(std::move(e));
    }
    std::swap(trait_prev, trait_now);

    for (int i = 0; i < n; ++i) {
      for (int j : recorded[static_cast<std::size_t>(i)]) {
        ties.push_back({wave, persons[static_cast<std::size_t>(i)].person_id,
                        persons[static_cast<std::size_t>(j)].person_id, TieKind::Friend});
      }
    }
  }

  GroundTruth truth;
  truth.mechanism = cfg.mechanism;
  truth.true_induction_coefficient =
      cfg.mechanism == Mechanism::Induction ? cfg.mechanism_strength : 0.0;
  for (int i = 0; i < n; ++i) {
    truth.latent.emplace(persons[static_cast<std::size_t>(i)].person_id,
                         LatentPosition{pos[static_cast<std::size_t>(i)]});
  }

  CohortPanel panel(TraitKind::Binary, std::move(persons), std::move(exams), std::move(ties));
  return {std::move(panel), std::move(truth)};
}

DistanceSamples nn_ball_experiment(int n, int dim, int replicates, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("nn_ball_experiment: n must be >= 2");
  if (dim < 1) throw std::invalid_argument("nn_ball_experiment: dim must be >= 1");
  if (replicates < 1) throw std::invalid_argument("nn_ball_experiment: replicates must be >= 1");

  DistanceSamples samples;
  const Rng root(seed);
  for (int rep = 0; rep < replicates; ++rep) {
    Rng rng = root.stream(static_cast<std::uint64_t>(rep));
    std::vector<std::vector<double>> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) p = uniform_in_ball(rng, dim);

    std::vector<int> nn(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) nn[static_cast<std::size_t>(i)] = nearest_neighbor(pts, i);

    for (int i = 0; i < n; ++i) {
      const int j = nn[static_cast<std::size_t>(i)];
      const double d = std::sqrt(sq_dist(pts[static_cast<std::size_t>(i)],
                                         pts[static_cast<std::size_t>(j)]));
      if (nn[static_cast<std::size_t>(j)] == i) {
        if (i < j) samples.mutual.push_back(d);  // count each reciprocal pair once
      } else {
        samples.nonmutual.push_back(d);
      }
    }
  }
  return samples;
}

DominanceReport dominance_check(const DistanceSamples& samples, int grid_size, int n_perms,
                                std::uint64_t seed) {
  if (samples.mutual.empty() || samples.nonmutual.empty()) {
    throw std::invalid_argument("dominance_check: both sample lists must be nonempty");
  }
  if (grid_size < 1) throw std::invalid_argument("dominance_check: grid_size must be >= 1");

  std::vector<double> mut = samples.mutual;
  std::vector<double> non = samples.nonmutual;
  std::sort(mut.begin(), mut.end());
  std::sort(non.begin(), non.end());
  const double dmax = std::max(mut.back(), non.back());

  auto ecdf = [](const std::vector<double>& sorted, double d) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), d);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
  };

  DominanceReport report;
  report.n_mutual = static_cast<int>(mut.size());
  report.n_nonmutual = static_cast<int>(non.size());
  double min_gap = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= grid_size; ++t) {
    const double d = dmax * static_cast<double>(t) / static_cast<double>(grid_size);
    min_gap = std::min(min_gap, ecdf(mut, d) - ecdf(non, d));
  }
  report.min_cdf_gap = min_gap;
  report.dominance_holds = min_gap >= 0.0;

  // one-sided rank statistic, P(mutual < nonmutual) + 0.5 P(equal)
  double u = 0.0;
  for (double x : mut) {
    const auto lo = std::lower_bound(non.begin(), non.end(), x);
    const auto hi = std::upper_bound(non.begin(), non.end(), x);
    u += static_cast<double>(non.end() - hi) + 0.5 * static_cast<double>(hi - lo);
  }
  report.mw_statistic = u / (static_cast<double>(mut.size()) * static_cast<double>(non.size()));

  // permutation p-value via midranks of the pooled sample
  const std::size_t nm = mut.size(), nn_ = non.size(), total = nm + nn_;
  std::vector<double> pooled;
  pooled.reserve(total);
  pooled.insert(pooled.end(), mut.begin(), mut.end());
  pooled.insert(pooled.end(), non.begin(), non.end());
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> midrank(total);
  for (std::size_t s = 0; s < total;) {
    std::size_t e = s;
    while (e < total && pooled[order[e]] == pooled[order[s]]) ++e;
    const double r = 0.5 * static_cast<double>(s + 1 + e);  // average of ranks s+1..e
    for (std::size_t k = s; k < e; ++k) midrank[order[k]] = r;
    s = e;
  }
  double obs_ranksum_non = 0.0;
  for (std::size_t k = nm; k < total; ++k) obs_ranksum_non += midrank[k];

  Rng rng = Rng(seed).stream(0xD0);
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), 0);
  int count = 0;
  for (int perm = 0; perm < n_perms; ++perm) {
    rng.shuffle(idx);
    double rs = 0.0;
    for (std::size_t k = 0; k < nn_; ++k) rs += midrank[idx[k]];
    if (rs >= obs_ranksum_non) ++count;
  }
  report.p_value = (1.0 + static_cast<double>(count)) / (1.0 + static_cast<double>(n_perms));
  return report;
}

}  // namespace netinf
