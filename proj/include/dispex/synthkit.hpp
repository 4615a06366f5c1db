#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dispex/causal_graph.hpp"
#include "dispex/pattern.hpp"
#include "dispex/table.hpp"

namespace dispex::synth {

struct CategoricalAttr {
  std::string name;
  std::size_t domain_size = 2;
  std::vector<double> probs;  // empty = uniform
};

// Per-level contribution of one parent attribute to a score.
struct LevelWeights {
  std::string attribute;
  std::vector<double> per_level;
};

// Level l of a mutable attribute has logit l * (bias + sum of parent weights),
// so parents shift mass towards higher levels.
struct MutableAttr {
  std::string name;
  std::size_t domain_size = 2;
  double bias = 0.0;
  std::vector<LevelWeights> parents;  // immutable parents only
};

struct PlantedEffect {
  Pattern subpopulation;  // immutable attributes only
  Pattern treatment;      // mutable attributes only
  double effect_g1 = 0.0;
  double effect_g2 = 0.0;
};

struct ScmSpec {
  std::vector<CategoricalAttr> immutable_attrs;
  std::vector<CategoricalAttr> group_attrs;  // loaded as auxiliary, define g1/g2
  std::vector<MutableAttr> mutable_attrs;
  double intercept = 10.0;
  std::vector<LevelWeights> outcome_weights;
  std::vector<PlantedEffect> planted_effects;
  Pattern g1;
  Pattern g2;
  std::string outcome_name = "Outcome";
  double noise_sd = 1.0;
  std::size_t n = 10'000;
  std::uint64_t seed = 0;
  std::size_t min_arm = 10;
};

struct GroundTruth {
  Pattern subpopulation;
  Pattern treatment;
  double effect_g1 = 0.0;
  double effect_g2 = 0.0;
  double true_delta = 0.0;  // |effect_g1 - effect_g2| / max_abs_outcome
};

struct SyntheticData {
  Dataset dataset;
  CausalDag dag;
  std::vector<GroundTruth> truth;
  ScmSpec spec;
};

// Level label for index `level` of a domain of `size` values: "L0", "L1", ...
// zero-padded so lexicographic order equals level order.
std::string level_label(std::size_t level, std::size_t size);

// Throws InputError on an invalid or infeasible spec.
SyntheticData generate(const ScmSpec& spec);

std::string to_csv(const Dataset& ds);
// Schema kinds for reloading the emitted CSV.
SchemaConfig schema_config(const ScmSpec& spec);

// Three disjoint planted subpopulations (Region=L0/L1/L2), each with its own
// treatment. The effect is positive in both groups but larger in g1
// (Group=L0) than in g2 (Group=L1), so both CATEs can be significant.
ScmSpec planted_benchmark(std::size_t n, std::uint64_t seed);
// Pure noise outcome: no weights, no planted effects.
ScmSpec null_model(std::size_t n, std::uint64_t seed);
// One binary treatment T confounded by Z, with effect (effect_g1, effect_g2)
// over the whole population.
ScmSpec confounded_single(std::size_t n, std::uint64_t seed, double effect_g1, double effect_g2);

}  // namespace dispex::synth
