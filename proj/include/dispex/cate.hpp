#pragma once

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dispex/causal_graph.hpp"
#include "dispex/pattern.hpp"
#include "dispex/table.hpp"

namespace dispex {

struct SamplingConfig {
  std::size_t max_rows = 50'000;
  std::uint64_t seed = 0;
  std::size_t min_arm = 10;
  double alpha = 0.05;
};

struct CateEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double p_value = 1.0;
  std::size_t n_treated = 0;
  std::size_t n_control = 0;
  bool significant = false;

  bool operator==(const CateEstimate&) const = default;
};

// 1 for scope tuples (in ascending id order) satisfying the treatment.
// Throws InputError if a treatment attribute is not mutable.
std::vector<std::uint8_t> treatment_indicator(const Dataset& ds, const TupleSet& scope,
                                              const Pattern& treatment);

// OLS of outcome ~ intercept + T + one-hot(confounders) over `rows`, where
// `treated[i]` is the indicator of rows[i]. Scopes larger than max_rows are
// subsampled (seeded, without replacement) first. Value is the T coefficient;
// p_value is the two-sided t-test with n - p degrees of freedom.
// Throws InsufficientOverlap or SingularDesign.
CateEstimate estimate_cate_rows(const Dataset& ds, std::span<const std::size_t> rows,
                                std::span<const std::uint8_t> treated,
                                std::span<const std::size_t> confounder_attrs,
                                const SamplingConfig& cfg);

CateEstimate estimate_cate(const Dataset& ds, const TupleSet& scope, const Pattern& treatment,
                           const AdjustmentSet& adj, const SamplingConfig& cfg);

// Concurrent memo of estimates, failures included. Estimation is
// deterministic, so racing inserts of the same key are harmless.
class EstimateCache {
 public:
  enum class Failure { None, InsufficientOverlap, SingularDesign };
  struct Entry {
    CateEstimate estimate;
    Failure failure = Failure::None;
  };

  std::optional<Entry> find(const std::string& key) const;
  void insert(const std::string& key, const Entry& entry);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, Entry> map_;
};

}  // namespace dispex
