#include "dispex/kernels.hpp"

#include <omp.h>

namespace dispex::kernels {

int resolve_workers(int workers) {
  return workers > 0 ? workers : omp_get_max_threads();
}

double jaccard(const TupleSet& a, const TupleSet& b) {
  const auto uni = a.union_count(b);
  if (uni == 0) return 0.0;
  return static_cast<double>(a.intersect_count(b)) / static_cast<double>(uni);
}

std::vector<std::size_t> intersect_counts_serial(const std::vector<JoinRequest>& joins) {
  std::vector<std::size_t> out(joins.size());
  for (std::size_t i = 0; i < joins.size(); ++i) {
    out[i] = joins[i].lhs->intersect_count(*joins[i].rhs);
  }
  return out;
}

std::vector<std::size_t> intersect_counts_parallel(const std::vector<JoinRequest>& joins,
                                                   int workers) {
  std::vector<std::size_t> out(joins.size());
  const auto n = static_cast<std::ptrdiff_t>(joins.size());
#pragma omp parallel for schedule(static) num_threads(resolve_workers(workers))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& j = joins[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = j.lhs->intersect_count(*j.rhs);
  }
  return out;
}

std::vector<double> jaccard_matrix_serial(const std::vector<TupleSet>& sets) {
  const auto n = sets.size();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double s = i == j && !sets[i].empty() ? 1.0 : jaccard(sets[i], sets[j]);
      out[i * n + j] = s;
      out[j * n + i] = s;
    }
  }
  return out;
}

std::vector<double> jaccard_matrix_parallel(const std::vector<TupleSet>& sets, int workers) {
  const auto n = sets.size();
  std::vector<double> out(n * n, 0.0);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4) num_threads(resolve_workers(workers))
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = i; j < n; ++j) {
      const double s = i == j && !sets[i].empty() ? 1.0 : jaccard(sets[i], sets[j]);
      out[i * n + j] = s;
      out[j * n + i] = s;
    }
  }
  return out;
}

}  // namespace dispex::kernels
