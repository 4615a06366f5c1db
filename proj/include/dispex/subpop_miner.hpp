#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "dispex/pattern.hpp"
#include "dispex/table.hpp"
#include "dispex/tuple_set.hpp"

namespace dispex {

// The two groups of interest, evaluated once. They may overlap.
struct GroupContext {
  Pattern g1_pattern;
  Pattern g2_pattern;
  TupleSet g1;
  TupleSet g2;
  TupleSet d_union;  // g1 ∪ g2

  static GroupContext build(const Dataset& ds, const Pattern& g1, const Pattern& g2);
};

struct Subpopulation {
  Pattern pattern;  // equality predicates over immutable attributes
  TupleSet tuples;
  TupleSet tuples_g1;
  TupleSet tuples_g2;
  double avg_g1 = 0.0;  // NaN when the slice is empty
  double avg_g2 = 0.0;
  double support = 0.0;  // |tuples ∩ (g1 ∪ g2)| / n

  std::size_t size_g1() const { return tuples_g1.count(); }
  std::size_t size_g2() const { return tuples_g2.count(); }
};

Subpopulation make_subpopulation(const Dataset& ds, const GroupContext& groups, Pattern pattern,
                                 TupleSet tuples);

enum class DirectionMode { G1Above, G1Below, ReverseOfGlobal };

DirectionMode parse_direction_mode(std::string_view text);
std::string_view to_string(DirectionMode mode);

struct SubpopMinerOptions {
  std::size_t max_predicates = 0;  // 0 = unlimited
  int workers = 1;
  bool parallel = true;  // false runs the serial reference kernel
};

// Level-wise Apriori over equality items of the immutable attributes. A
// pattern is kept when the fraction of all rows satisfying it is >= sigma.
// The empty pattern is never emitted. Output is sorted by serialization.
std::vector<Subpopulation> mine_frequent_subpopulations(const Dataset& ds, double sigma,
                                                        const GroupContext& groups,
                                                        const SubpopMinerOptions& opts = {});

// Keeps subpopulations matching the scenario direction; drops those whose
// g1 or g2 slice has fewer than min_arm tuples.
std::vector<Subpopulation> scenario_filter(std::vector<Subpopulation> subs, DirectionMode mode,
                                           double global_avg_g1, double global_avg_g2,
                                           std::size_t min_arm);

// g1_above or g1_below for one subpopulation. ReverseOfGlobal resolves to
// the subpopulation's own direction.
DirectionMode resolve_direction(DirectionMode mode, const Subpopulation& sub);

}  // namespace dispex
