#pragma once

#include <cstddef>
#include <vector>

#include "dispex/tuple_set.hpp"

// Data-parallel inner loops. Each kernel has a plain serial reference and an
// OpenMP version; both must produce identical results for any thread count.
namespace dispex::kernels {

struct JoinRequest {
  const TupleSet* lhs;
  const TupleSet* rhs;
};

// out[i] = |lhs_i ∩ rhs_i|
std::vector<std::size_t> intersect_counts_serial(const std::vector<JoinRequest>& joins);
std::vector<std::size_t> intersect_counts_parallel(const std::vector<JoinRequest>& joins,
                                                   int workers);

// Row-major n×n matrix of Jaccard similarities, with 0 for two empty sets.
std::vector<double> jaccard_matrix_serial(const std::vector<TupleSet>& sets);
std::vector<double> jaccard_matrix_parallel(const std::vector<TupleSet>& sets, int workers);

double jaccard(const TupleSet& a, const TupleSet& b);

// Thread count to use for `workers` (<= 0 means all available).
int resolve_workers(int workers);

}  // namespace dispex::kernels
