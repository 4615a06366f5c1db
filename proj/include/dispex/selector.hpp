#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dispex/explanation_miner.hpp"

namespace dispex {

enum class Linkage { Single, Complete, Average };
enum class ClusterDistance { Jaccard, SymmetricDifference };

struct SelectorConfig {
  std::size_t k = 5;
  double tau = 0.55;
  std::size_t num_clusters = 10;
  double sigma = 0.05;  // support floor enforced on every chosen explanation
  std::uint64_t seed = 0;
  Linkage linkage = Linkage::Average;
  ClusterDistance distance = ClusterDistance::Jaccard;
  // When a cluster representative fails the similarity gate, try another
  // random member of that cluster instead of skipping the cluster.
  bool resample_rejected = false;
  bool force_brute_force = false;
  int workers = 1;
};

struct SelectionResult {
  std::vector<DisparityExplanation> chosen;
  double objective = 0.0;
  std::vector<std::vector<double>> pairwise_sims;
  std::string note;  // set when fewer than k explanations were selected
};

// Jaccard similarity of the two subpopulations restricted to d_union.
double jaccard_sim(const DisparityExplanation& e1, const DisparityExplanation& e2,
                   const TupleSet& d_union);

using Clusters = std::vector<std::vector<std::size_t>>;

// Agglomerative clustering cut at min(num_clusters, |exps|) clusters.
// Merge ties go to the pair with the smallest (min member, min member)
// indices. Clusters are listed by smallest member.
Clusters cluster_explanations(const std::vector<DisparityExplanation>& exps,
                              std::size_t num_clusters, const TupleSet& d_union,
                              Linkage linkage = Linkage::Average,
                              ClusterDistance distance = ClusterDistance::Jaccard);

// Same, from a precomputed row-major distance matrix.
Clusters cluster_by_distance(const std::vector<double>& dist, std::size_t n,
                             std::size_t num_clusters, Linkage linkage);

SelectionResult greedy_select(const std::vector<DisparityExplanation>& exps,
                              const SelectorConfig& cfg, const TupleSet& d_union);

// Optimal feasible subset (size <= k, support >= sigma, pairwise SIM <= tau)
// by exhaustive search. Throws CombinatorialGuard above 1e7 subsets unless
// cfg.force_brute_force is set.
SelectionResult brute_force_select(const std::vector<DisparityExplanation>& exps,
                                   const SelectorConfig& cfg, const TupleSet& d_union);

// Top k by delta, no diversity constraint.
SelectionResult topk_select(const std::vector<DisparityExplanation>& exps, std::size_t k,
                            const TupleSet& d_union);

// Checks |chosen| <= k, support >= sigma and pairwise SIM <= tau.
bool is_feasible(const SelectionResult& r, const SelectorConfig& cfg, const TupleSet& d_union);

Linkage parse_linkage(std::string_view text);

}  // namespace dispex
