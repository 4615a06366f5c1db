#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dispex/causal_graph.hpp"
#include "dispex/explanation_miner.hpp"
#include "dispex/report.hpp"
#include "dispex/selector.hpp"
#include "dispex/table.hpp"

namespace dispex {

enum class SelectorKind { Greedy, BruteForce, TopK };

SelectorKind parse_selector(std::string_view text);
std::string_view to_string(SelectorKind kind);

struct PipelineConfig {
  std::string dataset;
  std::string dag;
  std::map<std::string, AttributeKind> attributes;
  std::string outcome;
  std::string g1;
  std::string g2;
  DirectionMode mode = DirectionMode::G1Above;
  double sigma = 0.05;
  double tau = 0.55;
  std::size_t k = 5;
  std::size_t num_clusters = 10;
  double alpha = 0.05;
  std::size_t max_rows = 50'000;
  std::size_t beam_width = 20;
  std::size_t max_treatment_predicates = 2;
  std::size_t min_arm = 10;
  std::size_t max_subpop_predicates = 0;  // 0 = unlimited
  int bins = 10;
  int workers = 0;  // 0 = available parallelism
  std::uint64_t seed = 0;
  SelectorKind selector = SelectorKind::Greedy;
  Linkage linkage = Linkage::Average;
  bool exhaustive_treatments = false;
  bool force_brute_force = false;

  // Throws InputError on out-of-range values.
  void validate() const;
};

// Reads a JSON config. Relative dataset/dag paths resolve against the
// config file's directory.
PipelineConfig load_config(const std::string& path);
PipelineConfig config_from_json(const std::string& text, const std::string& base_dir = "");
std::string config_to_json(const PipelineConfig& cfg);

// An error raised inside a pipeline stage, tagged with the stage name.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, std::string what, bool input_error)
      : std::runtime_error("stage '" + stage + "': " + what),
        stage_(std::move(stage)),
        input_error_(input_error) {}
  const std::string& stage() const { return stage_; }
  bool input_error() const { return input_error_; }

 private:
  std::string stage_;
  bool input_error_;
};

// Full pipeline from files named in the config.
ExplanationReport run(const PipelineConfig& cfg);
// Same, on an already loaded dataset and DAG.
ExplanationReport run_on(const Dataset& ds, const CausalDag& dag, const PipelineConfig& cfg);

struct SubpopulationListing {
  std::vector<Subpopulation> mined;     // Apriori output
  std::vector<Subpopulation> filtered;  // after support and scenario filters
  double global_avg_g1 = 0.0;
  double global_avg_g2 = 0.0;
};

SubpopulationListing list_subpopulations(const Dataset& ds, const PipelineConfig& cfg);

// Adds schema attributes missing from the DAG as isolated nodes; throws
// InputError for DAG nodes that are neither attributes nor the outcome.
CausalDag align_dag(const CausalDag& dag, const Dataset& ds);

}  // namespace dispex
