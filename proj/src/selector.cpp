#include "dispex/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dispex/errors.hpp"
#include "dispex/kernels.hpp"
#include "dispex/util.hpp"

namespace dispex {

namespace {

constexpr double kTieEps = 1e-12;
constexpr double kBruteForceLimit = 1e7;

std::vector<TupleSet> restricted_sets(const std::vector<DisparityExplanation>& exps,
                                      const std::vector<std::size_t>& idx,
                                      const TupleSet& d_union) {
  std::vector<TupleSet> sets;
  sets.reserve(idx.size());
  for (auto i : idx) sets.push_back(exps[i].subpopulation.tuples & d_union);
  return sets;
}

std::vector<std::size_t> eligible(const std::vector<DisparityExplanation>& exps, double sigma) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (exps[i].support >= sigma && std::isfinite(exps[i].delta)) out.push_back(i);
  }
  return out;
}

// Sum of deltas in ascending input order, so equal sets give equal sums.
double objective_of(const std::vector<DisparityExplanation>& exps, std::vector<std::size_t> idx) {
  std::sort(idx.begin(), idx.end());
  double s = 0.0;
  for (auto i : idx) s += exps[i].delta;
  return s;
}

SelectionResult make_result(const std::vector<DisparityExplanation>& exps,
                            const std::vector<std::size_t>& picked, const TupleSet& d_union,
                            std::size_t k) {
  SelectionResult r;
  for (auto i : picked) r.chosen.push_back(exps[i]);
  r.objective = objective_of(exps, picked);
  const auto n = picked.size();
  r.pairwise_sims.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      r.pairwise_sims[a][b] = jaccard_sim(r.chosen[a], r.chosen[b], d_union);
    }
  }
  if (n < k) {
    r.note = "only " + std::to_string(n) + " of k=" + std::to_string(k) +
             " explanations satisfy the constraints";
  }
  return r;
}

}  // namespace

double jaccard_sim(const DisparityExplanation& e1, const DisparityExplanation& e2,
                   const TupleSet& d_union) {
  const auto a = e1.subpopulation.tuples & d_union;
  const auto b = e2.subpopulation.tuples & d_union;
  return kernels::jaccard(a, b);
}

Linkage parse_linkage(std::string_view text) {
  if (text == "single") return Linkage::Single;
  if (text == "complete") return Linkage::Complete;
  if (text == "average") return Linkage::Average;
  throw InputError("unknown linkage '" + std::string(text) + "'");
}

Clusters cluster_by_distance(const std::vector<double>& dist, std::size_t n,
                             std::size_t num_clusters, Linkage linkage) {
  if (n == 0) return {};
  const auto target = std::max<std::size_t>(1, std::min(num_clusters, n));
  std::vector<double> d = dist;
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  // Slots stay ordered by smallest member: a merge always folds the higher
  // slot into the lower one.
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;

  while (active.size() > target) {
    std::size_t best_a = 0;
    std::size_t best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const double v = d[active[x] * n + active[y]];
        if (v < best - kTieEps) {
          best = v;
          best_a = x;
          best_b = y;
        }
      }
    }
    const auto a = active[best_a];
    const auto b = active[best_b];
    const double na = static_cast<double>(members[a].size());
    const double nb = static_cast<double>(members[b].size());
    for (auto c : active) {
      if (c == a || c == b) continue;
      const double dac = d[a * n + c];
      const double dbc = d[b * n + c];
      double v = 0.0;
      switch (linkage) {
        case Linkage::Single: v = std::min(dac, dbc); break;
        case Linkage::Complete: v = std::max(dac, dbc); break;
        case Linkage::Average: v = (na * dac + nb * dbc) / (na + nb); break;
      }
      d[a * n + c] = v;
      d[c * n + a] = v;
    }
    members[a].insert(members[a].end(), members[b].begin(), members[b].end());
    std::sort(members[a].begin(), members[a].end());
    members[b].clear();
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
  }

  Clusters out;
  for (auto s : active) out.push_back(members[s]);
  return out;
}

Clusters cluster_explanations(const std::vector<DisparityExplanation>& exps,
                              std::size_t num_clusters, const TupleSet& d_union, Linkage linkage,
                              ClusterDistance distance) {
  std::vector<std::size_t> idx(exps.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto sets = restricted_sets(exps, idx, d_union);
  const auto n = sets.size();
  std::vector<double> dist(n * n, 0.0);
  if (distance == ClusterDistance::Jaccard) {
    const auto sim = kernels::jaccard_matrix_serial(sets);
    for (std::size_t i = 0; i < n * n; ++i) dist[i] = 1.0 - sim[i];
    for (std::size_t i = 0; i < n; ++i) dist[i * n + i] = 0.0;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        dist[i * n + j] = static_cast<double>(sets[i].union_count(sets[j]) -
                                              sets[i].intersect_count(sets[j]));
      }
    }
  }
  return cluster_by_distance(dist, n, num_clusters, linkage);
}

SelectionResult greedy_select(const std::vector<DisparityExplanation>& exps,
                              const SelectorConfig& cfg, const TupleSet& d_union) {
  const auto elig = eligible(exps, cfg.sigma);
  if (elig.empty()) return make_result(exps, {}, d_union, cfg.k);

  const auto sets = restricted_sets(exps, elig, d_union);
  const auto m = elig.size();
  const auto sim = kernels::jaccard_matrix_parallel(sets, cfg.workers);
  std::vector<double> dist(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      dist[i * m + j] = cfg.distance == ClusterDistance::Jaccard
                            ? 1.0 - sim[i * m + j]
                            : static_cast<double>(sets[i].union_count(sets[j]) -
                                                  sets[i].intersect_count(sets[j]));
    }
  }
  const auto clusters = cluster_by_distance(dist, m, cfg.num_clusters, cfg.linkage);

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> rep(clusters.size());  // local index into elig
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    rep[c] = clusters[c][uniform_below(rng, clusters[c].size())];
  }

  std::vector<std::size_t> chosen;  // local indices
  std::vector<bool> used(clusters.size(), false);
  auto passes_gate = [&](std::size_t local) {
    return std::all_of(chosen.begin(), chosen.end(),
                       [&](std::size_t c) { return sim[local * m + c] < cfg.tau; });
  };
  auto delta = [&](std::size_t local) { return exps[elig[local]].delta; };

  // First pick: representative of the highest-scoring cluster, seeded tie-break.
  {
    double best = -std::numeric_limits<double>::infinity();
    for (auto r : rep) best = std::max(best, delta(r));
    std::vector<std::size_t> tied;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (delta(rep[c]) == best) tied.push_back(c);
    }
    const auto c = tied[uniform_below(rng, tied.size())];
    chosen.push_back(rep[c]);
    used[c] = true;
  }

  while (chosen.size() < cfg.k) {
    std::optional<std::size_t> best_cluster;
    std::size_t best_local = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (used[c]) continue;
      std::optional<std::size_t> cand;
      if (passes_gate(rep[c])) {
        cand = rep[c];
      } else if (cfg.resample_rejected) {
        std::vector<std::size_t> ok;
        for (auto mbr : clusters[c]) {
          if (passes_gate(mbr)) ok.push_back(mbr);
        }
        if (!ok.empty()) cand = ok[uniform_below(rng, ok.size())];
      }
      if (!cand) continue;
      if (!best_cluster || delta(*cand) > delta(best_local) ||
          (delta(*cand) == delta(best_local) && *cand < best_local)) {
        best_cluster = c;
        best_local = *cand;
      }
    }
    if (!best_cluster) break;
    chosen.push_back(best_local);
    used[*best_cluster] = true;
  }

  std::vector<std::size_t> picked;
  for (auto l : chosen) picked.push_back(elig[l]);
  return make_result(exps, picked, d_union, cfg.k);
}

SelectionResult brute_force_select(const std::vector<DisparityExplanation>& exps,
                                   const SelectorConfig& cfg, const TupleSet& d_union) {
  const auto elig = eligible(exps, cfg.sigma);
  const auto m = elig.size();
  const auto kmax = std::min(cfg.k, m);

  double combos = 0.0;
  double binom = 1.0;
  for (std::size_t i = 0; i <= kmax; ++i) {
    combos += binom;
    binom = binom * static_cast<double>(m - i) / static_cast<double>(i + 1);
  }
  if (combos > kBruteForceLimit && !cfg.force_brute_force) {
    throw CombinatorialGuard("brute force over " + std::to_string(m) + " candidates with k=" +
                             std::to_string(cfg.k) + " exceeds 1e7 subsets");
  }

  const auto sets = restricted_sets(exps, elig, d_union);
  const auto sim = kernels::jaccard_matrix_parallel(sets, cfg.workers);

  std::vector<std::size_t> current;
  std::vector<std::size_t> best_set;
  double best = 0.0;
  // Depth-first in lexicographic subset order; strict improvement keeps the
  // lexicographically first optimum.
  auto dfs = [&](auto&& self, std::size_t start, double sum) -> void {
    if (sum > best) {
      best = sum;
      best_set = current;
    }
    if (current.size() == kmax) return;
    for (std::size_t i = start; i < m; ++i) {
      bool ok = true;
      for (auto c : current) {
        if (sim[i * m + c] > cfg.tau) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      current.push_back(i);
      self(self, i + 1, sum + exps[elig[i]].delta);
      current.pop_back();
    }
  };
  dfs(dfs, 0, 0.0);

  std::vector<std::size_t> picked;
  for (auto l : best_set) picked.push_back(elig[l]);
  return make_result(exps, picked, d_union, cfg.k);
}

SelectionResult topk_select(const std::vector<DisparityExplanation>& exps, std::size_t k,
                            const TupleSet& d_union) {
  std::vector<std::size_t> order(exps.size());
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    order[i] = i;
    keys.push_back(exps[i].key());
  }
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    if (exps[a].delta != exps[b].delta) return exps[a].delta > exps[b].delta;
    return keys[a] < keys[b];
  });
  order.resize(std::min(k, order.size()));
  return make_result(exps, order, d_union, k);
}

bool is_feasible(const SelectionResult& r, const SelectorConfig& cfg, const TupleSet& d_union) {
  if (r.chosen.size() > cfg.k) return false;
  for (std::size_t a = 0; a < r.chosen.size(); ++a) {
    if (r.chosen[a].support < cfg.sigma) return false;
    for (std::size_t b = a + 1; b < r.chosen.size(); ++b) {
      if (jaccard_sim(r.chosen[a], r.chosen[b], d_union) > cfg.tau) return false;
    }
  }
  return true;
}

}  // namespace dispex
