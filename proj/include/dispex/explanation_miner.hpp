#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dispex/cate.hpp"
#include "dispex/causal_graph.hpp"
#include "dispex/subpop_miner.hpp"

namespace dispex {

struct DisparityExplanation {
  Subpopulation subpopulation;
  Pattern treatment;
  CateEstimate cate_g1;
  CateEstimate cate_g2;
  double delta = 0.0;
  double support = 0.0;

  // "<subpopulation> | <treatment>", the canonical tie-break key.
  std::string key() const;
};

struct MinerConfig {
  std::size_t max_treatment_predicates = 2;
  std::size_t beam_width = 20;
  int workers = 1;
  std::uint64_t seed = 0;
  DirectionMode mode = DirectionMode::G1Above;
  SamplingConfig sampling;  // sampling.seed is overwritten with `seed`
  // Search all single and multi-predicate treatments instead of the beam.
  bool exhaustive = false;
  bool use_cache = true;
};

// |cate_g1 - cate_g2| / max_abs_outcome
double disparity_score(const CateEstimate& cate_g1, const CateEstimate& cate_g2,
                       double max_abs_outcome);

// `direction` must already be resolved to G1Above or G1Below.
bool direction_consistent(const CateEstimate& cate_g1, const CateEstimate& cate_g2,
                          DirectionMode direction);

struct SubpopulationSearch {
  std::optional<DisparityExplanation> best;
  std::size_t candidates_estimated = 0;  // treatments whose two CATEs were estimated
};

class ExplanationMiner {
 public:
  // Every mutable attribute must be a node of `dag`.
  ExplanationMiner(const Dataset& ds, CausalDag dag, const GroupContext& groups, MinerConfig cfg);

  SubpopulationSearch search(const Subpopulation& sub) const;

  // Fans out over subpopulations; output sorted by delta descending, ties by
  // key(), independent of the worker count.
  std::vector<DisparityExplanation> mine_all(const std::vector<Subpopulation>& subs) const;
  // Single-threaded reference for mine_all.
  std::vector<DisparityExplanation> mine_all_serial(const std::vector<Subpopulation>& subs) const;

  // Same treatment estimated on the full g1 / g2 slices; nullopt when the
  // slice lacks overlap or the design is singular.
  std::optional<CateEstimate> global_effect(const Pattern& treatment, bool for_g1) const;

  AdjustmentSet adjustment_for(const Pattern& treatment) const;

  std::size_t estimates_computed() const { return estimates_computed_.load(); }
  std::size_t cache_size() const { return cache_.size(); }
  const MinerConfig& config() const { return cfg_; }

 private:
  struct Scope {
    std::string key;
    std::vector<std::size_t> rows;
    const TupleSet* tuples;
  };
  struct Candidate {
    Pattern treatment;
    std::vector<std::pair<std::size_t, std::int32_t>> items;  // (attr, code), ascending attr
    TupleSet treated;
  };

  std::optional<CateEstimate> estimate(const Scope& scope, const Candidate& cand) const;
  bool has_overlap(const TupleSet& slice, std::size_t slice_size, const TupleSet& treated) const;

  const Dataset& ds_;
  CausalDag dag_;
  std::uint64_t dag_fp_;
  const GroupContext& groups_;
  MinerConfig cfg_;
  std::vector<Candidate> singles_;

  mutable EstimateCache cache_;
  mutable std::mutex adj_mu_;
  mutable std::map<std::string, AdjustmentSet> adj_cache_;
  mutable std::atomic<std::size_t> estimates_computed_{0};
};

std::optional<DisparityExplanation> mine_treatments_for_subpopulation(
    const Dataset& ds, const CausalDag& dag, const GroupContext& groups, const Subpopulation& sub,
    const MinerConfig& cfg);

std::vector<DisparityExplanation> mine_all(const Dataset& ds, const CausalDag& dag,
                                           const GroupContext& groups,
                                           const std::vector<Subpopulation>& subs,
                                           const MinerConfig& cfg);

}  // namespace dispex
