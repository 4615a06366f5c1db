#pragma once

// Independent reference implementations used as test oracles. None of these
// call into the library's algorithms; they work on plain rows and std
// containers so that a bug in the optimized code cannot hide in both.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// Categorical table as plain strings.
struct Rows {
  std::vector<std::string> attrs;             // immutable attribute names
  std::vector<std::vector<std::string>> cells;  // cells[row][attr]
};

// Every non-empty conjunction of equality predicates (at most one per
// attribute) whose row frequency is >= sigma, serialized as "A=v & B=w"
// with attributes in name order.
inline std::set<std::string> frequent_patterns(const Rows& t, double sigma) {
  std::vector<std::size_t> order(t.attrs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return t.attrs[a] < t.attrs[b]; });

  std::vector<std::vector<std::string>> domains(t.attrs.size());
  for (std::size_t a = 0; a < t.attrs.size(); ++a) {
    std::set<std::string> d;
    for (const auto& r : t.cells) d.insert(r[a]);
    domains[a].assign(d.begin(), d.end());
  }

  std::set<std::string> out;
  const double n = static_cast<double>(t.cells.size());
  // choice[a] = -1 (attribute unused) or a domain index.
  std::vector<int> choice(t.attrs.size(), -1);
  auto visit = [&] {
    std::size_t count = 0;
    for (const auto& r : t.cells) {
      bool ok = true;
      for (std::size_t a = 0; a < choice.size() && ok; ++a) {
        if (choice[a] >= 0 && r[a] != domains[a][static_cast<std::size_t>(choice[a])]) ok = false;
      }
      count += ok;
    }
    if (static_cast<double>(count) / n < sigma) return;
    std::string s;
    for (auto a : order) {
      if (choice[a] < 0) continue;
      if (!s.empty()) s += " & ";
      s += t.attrs[a] + "=" + domains[a][static_cast<std::size_t>(choice[a])];
    }
    if (!s.empty()) out.insert(s);
  };
  // Odometer over all choice vectors.
  while (true) {
    visit();
    std::size_t a = 0;
    while (a < choice.size()) {
      if (choice[a] + 1 < static_cast<int>(domains[a].size())) {
        ++choice[a];
        break;
      }
      choice[a] = -1;
      ++a;
    }
    if (a == choice.size()) break;
  }
  return out;
}

// Least squares by Gaussian elimination with partial pivoting on the normal
// equations, in long double. Columns that are (numerically) linear
// combinations of earlier ones get coefficient 0.
inline std::vector<double> ols(const std::vector<std::vector<double>>& X,
                               const std::vector<double>& y) {
  const std::size_t p = X.empty() ? 0 : X[0].size();
  std::vector<std::vector<long double>> A(p, std::vector<long double>(p + 1, 0.0L));
  for (std::size_t r = 0; r < X.size(); ++r) {
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) A[i][j] += static_cast<long double>(X[r][i]) * X[r][j];
      A[i][p] += static_cast<long double>(X[r][i]) * y[r];
    }
  }
  std::vector<int> pivot_row(p, -1);
  std::size_t row = 0;
  for (std::size_t c = 0; c < p && row < p; ++c) {
    std::size_t best = row;
    for (std::size_t r = row + 1; r < p; ++r) {
      if (std::fabs(A[r][c]) > std::fabs(A[best][c])) best = r;
    }
    if (std::fabs(A[best][c]) < 1e-9L) continue;
    std::swap(A[row], A[best]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == row) continue;
      const long double f = A[r][c] / A[row][c];
      for (std::size_t j = c; j <= p; ++j) A[r][j] -= f * A[row][j];
    }
    pivot_row[c] = static_cast<int>(row);
    ++row;
  }
  std::vector<double> beta(p, 0.0);
  for (std::size_t c = 0; c < p; ++c) {
    if (pivot_row[c] >= 0) {
      const auto& r = A[static_cast<std::size_t>(pivot_row[c])];
      beta[c] = static_cast<double>(r[p] / r[c]);
    }
  }
  return beta;
}

inline double jaccard(const std::set<std::size_t>& a, const std::set<std::size_t>& b) {
  std::size_t inter = 0;
  for (auto x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Agglomerative clustering recomputed from scratch at every merge: the
// linkage distance of two clusters is the mean (or min / max) over all member
// pairs. Ties go to the pair with the smallest (min member, min member).
// Returns clusters sorted by smallest member, members ascending.
inline std::vector<std::vector<std::size_t>> naive_cluster(const std::vector<double>& dist,
                                                           std::size_t n, std::size_t k,
                                                           char linkage = 'a') {
  std::vector<std::vector<std::size_t>> cl;
  for (std::size_t i = 0; i < n; ++i) cl.push_back({i});
  auto link = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (auto x : a) {
      for (auto y : b) {
        const double d = dist[x * n + y];
        sum += d;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    }
    if (linkage == 's') return lo;
    if (linkage == 'c') return hi;
    return sum / static_cast<double>(a.size() * b.size());
  };
  while (cl.size() > std::max<std::size_t>(k, 1)) {
    std::sort(cl.begin(), cl.end());
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cl.size(); ++i) {
      for (std::size_t j = i + 1; j < cl.size(); ++j) {
        const double d = link(cl[i], cl[j]);
        if (d < best - 1e-12) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    cl[bi].insert(cl[bi].end(), cl[bj].begin(), cl[bj].end());
    std::sort(cl[bi].begin(), cl[bi].end());
    cl.erase(cl.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  std::sort(cl.begin(), cl.end());
  return cl;
}

// Size of a maximum independent set, by enumerating vertex subsets.
inline std::size_t max_independent_set(std::size_t n,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (const auto& [u, v] : edges) {
      if ((mask >> u & 1u) && (mask >> v & 1u)) ok = false;
    }
    if (ok) best = std::max<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(mask)));
  }
  return best;
}

// Best total score over subsets of size <= k that satisfy `allowed(i)` for
// members and `compatible(i, j)` for pairs, by bitmask enumeration.
template <typename Allowed, typename Compatible>
double best_subset(const std::vector<double>& score, std::size_t k, Allowed allowed,
                   Compatible compatible) {
  const std::size_t m = score.size();
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > k) continue;
    bool ok = true;
    double total = 0.0;
    for (std::size_t i = 0; i < m && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      if (!allowed(i)) ok = false;
      total += score[i];
      for (std::size_t j = i + 1; j < m && ok; ++j) {
        if ((mask >> j & 1u) && !compatible(i, j)) ok = false;
      }
    }
    if (ok) best = std::max(best, total);
  }
  return best;
}

}  // namespace oracle
