#include "netinf/permnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "netinf/rng.hpp"
#include "netinf/stats.hpp"

namespace netinf {

namespace {

// Graph view of one wave: persons examined at the wave, tie kinds merged.
struct WaveGraph {
  std::vector<std::string> ids;              // index -> person id, sorted
  std::vector<int> fp_indices;
  std::vector<double> trait;                 // dichotomized, aligned with ids
  std::vector<std::vector<int>> adjacency;   // out-neighbors (symmetrized if undirected)
};

WaveGraph build_graph(const CohortPanel& panel, int wave, double count_threshold, bool directed) {
  WaveGraph g;
  std::unordered_map<std::string, int> index;
  for (const PersonRecord& p : panel.persons()) {
    const ExamRecord* e = panel.exam(p.person_id, wave);
    if (!e) continue;  // not examined at this wave
    const int idx = static_cast<int>(g.ids.size());
    index.emplace(p.person_id, idx);
    g.ids.push_back(p.person_id);
    if (p.is_fp) g.fp_indices.push_back(idx);
    const double y = panel.trait_kind() == TraitKind::Binary
                         ? e->trait
                         : (e->trait >= count_threshold ? 1.0 : 0.0);
    g.trait.push_back(y);
  }
  g.adjacency.resize(g.ids.size());
  for (const TieRecord& t : panel.ties()) {
    if (t.wave != wave) continue;
    const auto si = index.find(t.source_id);
    const auto ti = index.find(t.target_id);
    if (si == index.end() || ti == index.end()) continue;
    g.adjacency[static_cast<std::size_t>(si->second)].push_back(ti->second);
    if (!directed) g.adjacency[static_cast<std::size_t>(ti->second)].push_back(si->second);
  }
  return g;
}

// BFS distances from source, capped at max_k (-1 = unreachable within cap)
std::vector<int> bfs_distances(const WaveGraph& g, int source, int max_k) {
  std::vector<int> dist(g.ids.size(), -1);
  std::queue<int> q;
  dist[static_cast<std::size_t>(source)] = 0;
  q.push(source);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    const int du = dist[static_cast<std::size_t>(u)];
    if (du >= max_k) continue;
    for (int v : g.adjacency[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = du + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

// index pairs (fp, other) at each distance 1..max_k
std::vector<std::vector<std::pair<int, int>>> pairs_by_degree(const WaveGraph& g, int max_k) {
  std::vector<std::vector<std::pair<int, int>>> out(static_cast<std::size_t>(max_k) + 1);
  for (int fp : g.fp_indices) {
    const std::vector<int> dist = bfs_distances(g, fp, max_k);
    for (std::size_t j = 0; j < dist.size(); ++j) {
      const int d = dist[j];
      if (d >= 1 && d <= max_k) out[static_cast<std::size_t>(d)].emplace_back(fp, static_cast<int>(j));
    }
  }
  return out;
}

// q_k over a pair list given a trait vector; nullopt when the denominator is empty
std::optional<double> q_statistic(const std::vector<std::pair<int, int>>& pairs,
                                  const std::vector<double>& trait) {
  long denom = 0, numer = 0;
  for (const auto& [i, j] : pairs) {
    if (trait[static_cast<std::size_t>(j)] == 1.0) {
      ++denom;
      if (trait[static_cast<std::size_t>(i)] == 1.0) ++numer;
    }
  }
  if (denom == 0) return std::nullopt;
  return static_cast<double>(numer) / static_cast<double>(denom);
}

// ratio a/b with the conventions needed for percentile bands: a zero
// percentile with a positive observed value gives an infinite ratio
double safe_ratio(double a, double b) {
  if (b > 0.0) return a / b;
  return a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<std::pair<std::string, std::string>> degree_pairs(const CohortPanel& panel, int wave,
                                                              int k, bool directed) {
  if (k < 1) throw std::invalid_argument("degree_pairs: k must be >= 1");
  if (wave < 1 || wave > panel.max_wave()) {
    throw PanelError("degree_pairs: wave " + std::to_string(wave) + " not present in panel");
  }
  const WaveGraph g = build_graph(panel, wave, 3.0, directed);
  const auto by_degree = pairs_by_degree(g, k);
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [i, j] : by_degree[static_cast<std::size_t>(k)]) {
    out.emplace_back(g.ids[static_cast<std::size_t>(i)], g.ids[static_cast<std::size_t>(j)]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double degree_association(const CohortPanel& panel, int wave, int k, double count_threshold,
                          bool directed) {
  if (k < 1) throw std::invalid_argument("degree_association: k must be >= 1");
  const WaveGraph g = build_graph(panel, wave, count_threshold, directed);
  const auto by_degree = pairs_by_degree(g, k);
  const auto q = q_statistic(by_degree[static_cast<std::size_t>(k)], g.trait);
  if (!q) {
    throw NotComputable("degree_association: no pair at distance " + std::to_string(k) +
                        " has a trait-positive alter");
  }
  return *q;
}

std::vector<DegreeAssociation> permutation_test(const CohortPanel& panel, int wave,
                                                const PermTestOptions& opt) {
  if (opt.n_perms < 1) throw std::invalid_argument("permutation_test: n_perms must be >= 1");
  if (opt.max_k < 1) throw std::invalid_argument("permutation_test: max_k must be >= 1");

  const WaveGraph g = build_graph(panel, wave, opt.count_threshold, opt.directed);
  const auto by_degree = pairs_by_degree(g, opt.max_k);

  // replicate trait vectors: uniform permutations of the observed traits,
  // each replicate on its own substream
  const Rng root(opt.seed);
  std::vector<std::vector<double>> replicate_q(static_cast<std::size_t>(opt.max_k) + 1);
  std::vector<double> perm_trait = g.trait;
  for (int rep = 0; rep < opt.n_perms; ++rep) {
    Rng rng = root.stream(static_cast<std::uint64_t>(rep));
    perm_trait = g.trait;
    rng.shuffle(perm_trait);
    for (int k = 1; k <= opt.max_k; ++k) {
      const auto q = q_statistic(by_degree[static_cast<std::size_t>(k)], perm_trait);
      if (q) replicate_q[static_cast<std::size_t>(k)].push_back(*q);
    }
  }

  std::vector<DegreeAssociation> out;
  for (int k = 1; k <= opt.max_k; ++k) {
    const auto& pairs = by_degree[static_cast<std::size_t>(k)];
    const auto observed = q_statistic(pairs, g.trait);
    const auto& reps = replicate_q[static_cast<std::size_t>(k)];
    if (!observed || reps.empty()) continue;  // degree not computable: absent from the report

    DegreeAssociation a;
    a.degree = k;
    a.observed = *observed;
    a.perm_mean = mean(reps);
    a.rel_increase = safe_ratio(a.observed, a.perm_mean) - 1.0;
    const double hi_pct = percentile(reps, 1.0 - opt.alpha / 2.0);
    const double lo_pct = percentile(reps, opt.alpha / 2.0);
    a.interval_low = safe_ratio(a.observed, hi_pct) - 1.0;
    a.interval_high = safe_ratio(a.observed, lo_pct) - 1.0;
    a.n_pairs = static_cast<long>(pairs.size());
    a.n_perms = static_cast<int>(reps.size());
    out.push_back(a);
  }
  return out;
}

}  // namespace netinf
