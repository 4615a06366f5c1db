#include "dispex/cate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>

#include "dispex/errors.hpp"
#include "dispex/util.hpp"

namespace dispex {

namespace {

constexpr double kRankTolerance = 1e-10;

// Seeded uniform sample of `k` positions out of [0, total), ascending.
std::vector<std::size_t> sample_positions(std::size_t total, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(rng, total - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

std::vector<std::uint8_t> treatment_indicator(const Dataset& ds, const TupleSet& scope,
                                              const Pattern& treatment) {
  for (const auto& attr : treatment.attributes()) {
    if (ds.attribute(ds.index_of(attr)).kind != AttributeKind::Mutable) {
      throw InputError("treatment attribute '" + attr + "' is not mutable");
    }
  }
  const auto treated = evaluate_pattern(ds, treatment);
  std::vector<std::uint8_t> out;
  out.reserve(scope.count());
  scope.for_each([&](std::size_t i) { out.push_back(treated.contains(i) ? 1 : 0); });
  return out;
}

CateEstimate estimate_cate_rows(const Dataset& ds, std::span<const std::size_t> rows,
                                std::span<const std::uint8_t> treated,
                                std::span<const std::size_t> confounder_attrs,
                                const SamplingConfig& cfg) {
  if (rows.size() != treated.size()) throw std::invalid_argument("rows/indicator size mismatch");
  if (rows.empty()) throw InsufficientOverlap("empty scope");

  std::vector<std::size_t> pos;
  if (rows.size() > cfg.max_rows) {
    pos = sample_positions(rows.size(), cfg.max_rows, cfg.seed);
  } else {
    pos.resize(rows.size());
    std::iota(pos.begin(), pos.end(), std::size_t{0});
  }
  const std::size_t m = pos.size();

  std::size_t n_t = 0;
  for (auto p : pos) n_t += treated[p];
  const std::size_t n_c = m - n_t;
  if (n_t < cfg.min_arm || n_c < cfg.min_arm) {
    throw InsufficientOverlap("treated=" + std::to_string(n_t) + " control=" +
                              std::to_string(n_c) + " below min_arm=" +
                              std::to_string(cfg.min_arm));
  }

  // Column layout: 0 intercept, 1 treatment, then per confounder one dummy per
  // non-reference level (reference = domain code 0) plus one for missing.
  struct Block {
    std::size_t attr;
    std::size_t first_col;
    std::size_t levels;
  };
  std::vector<Block> blocks;
  std::size_t p = 2;
  for (auto a : confounder_attrs) {
    const auto levels = ds.attribute(a).domain.size();
    blocks.push_back({a, p, levels});
    p += levels;  // levels - 1 dummies + missing
  }
  auto dummy_col = [&](const Block& b, std::int32_t code) -> std::optional<std::size_t> {
    if (code == Dataset::kMissing) return b.first_col + b.levels - 1;
    if (code == 0) return std::nullopt;
    return b.first_col + static_cast<std::size_t>(code) - 1;
  };

  const auto y = ds.outcome();
  double y_mean = 0.0;
  for (auto q : pos) y_mean += y[rows[q]];
  y_mean /= static_cast<double>(m);

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                               static_cast<Eigen::Index>(p));
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  std::vector<std::size_t> active;
  active.reserve(2 + blocks.size());
  auto row_columns = [&](std::size_t q) {
    active.clear();
    active.push_back(0);
    if (treated[q]) active.push_back(1);
    const auto r = rows[q];
    for (const auto& b : blocks) {
      if (auto c = dummy_col(b, ds.column(b.attr)[r])) active.push_back(*c);
    }
  };
  for (auto q : pos) {
    row_columns(q);
    const double yc = y[rows[q]] - y_mean;
    for (auto i : active) {
      xty(static_cast<Eigen::Index>(i)) += yc;
      for (auto j : active) gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += 1.0;
    }
  }

  // Greedy column selection: a column is kept when its Schur-complement pivot
  // against the kept columns is numerically nonzero. The treatment column is
  // tried last, so a treatment explained by the confounders is detected.
  const double max_diag = gram.diagonal().maxCoeff();
  std::vector<std::size_t> kept;
  Eigen::MatrixXd chol(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  std::vector<std::size_t> order{0};
  for (std::size_t c = 2; c < p; ++c) order.push_back(c);
  order.push_back(1);
  for (auto c : order) {
    const auto ci = static_cast<Eigen::Index>(c);
    if (gram(ci, ci) == 0.0) continue;
    const auto k = static_cast<Eigen::Index>(kept.size());
    Eigen::VectorXd w(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      double s = gram(static_cast<Eigen::Index>(kept[static_cast<std::size_t>(i)]), ci);
      for (Eigen::Index j = 0; j < i; ++j) s -= chol(i, j) * w(j);
      w(i) = s / chol(i, i);
    }
    const double d = gram(ci, ci) - w.squaredNorm();
    if (d <= kRankTolerance * max_diag) continue;
    for (Eigen::Index j = 0; j < k; ++j) chol(k, j) = w(j);
    chol(k, k) = std::sqrt(d);
    kept.push_back(c);
  }
  if (kept.empty() || kept.back() != 1) {
    throw SingularDesign("treatment indicator is collinear with the confounders");
  }
  const auto kp = static_cast<Eigen::Index>(kept.size());
  if (static_cast<std::size_t>(kp) >= m) {
    throw SingularDesign("no residual degrees of freedom");
  }

  Eigen::MatrixXd g(kp, kp);
  Eigen::VectorXd b(kp);
  for (Eigen::Index i = 0; i < kp; ++i) {
    const auto ki = static_cast<Eigen::Index>(kept[static_cast<std::size_t>(i)]);
    b(i) = xty(ki);
    for (Eigen::Index j = 0; j < kp; ++j) {
      g(i, j) = gram(ki, static_cast<Eigen::Index>(kept[static_cast<std::size_t>(j)]));
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(g);
  const Eigen::VectorXd beta = llt.solve(b);
  const Eigen::Index t_slot = kp - 1;
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(kp);
  unit(t_slot) = 1.0;
  const double inv_tt = llt.solve(unit)(t_slot);

  std::vector<Eigen::Index> slot(p, -1);
  for (Eigen::Index i = 0; i < kp; ++i) slot[kept[static_cast<std::size_t>(i)]] = i;
  double rss = 0.0;
  for (auto q : pos) {
    row_columns(q);
    double fit = 0.0;
    for (auto c : active) {
      if (slot[c] >= 0) fit += beta(slot[c]);
    }
    const double r = (y[rows[q]] - y_mean) - fit;
    rss += r * r;
  }

  const double dof = static_cast<double>(m - static_cast<std::size_t>(kp));
  CateEstimate est;
  est.value = beta(t_slot);
  est.n_treated = n_t;
  est.n_control = n_c;
  est.std_error = std::sqrt(std::max(0.0, rss / dof * inv_tt));
  if (est.std_error > 0.0) {
    const boost::math::students_t dist(dof);
    const double t = std::fabs(est.value / est.std_error);
    est.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
  } else {
    est.p_value = est.value == 0.0 ? 1.0 : 0.0;
  }
  est.significant = est.p_value < cfg.alpha;
  return est;
}

CateEstimate estimate_cate(const Dataset& ds, const TupleSet& scope, const Pattern& treatment,
                           const AdjustmentSet& adj, const SamplingConfig& cfg) {
  if (scope.empty()) throw InsufficientOverlap("empty scope");
  const auto rows = scope.ids();
  const auto indicator = treatment_indicator(ds, scope, treatment);
  std::vector<std::size_t> attrs;
  for (const auto& name : adj.confounders) attrs.push_back(ds.index_of(name));
  std::sort(attrs.begin(), attrs.end(), [&](auto a, auto b) {
    return ds.attribute(a).name < ds.attribute(b).name;
  });
  return estimate_cate_rows(ds, rows, indicator, attrs, cfg);
}

std::optional<EstimateCache::Entry> EstimateCache::find(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = map_.find(key);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void EstimateCache::insert(const std::string& key, const Entry& entry) {
  std::unique_lock lock(mu_);
  map_.insert_or_assign(key, entry);
}

std::size_t EstimateCache::size() const {
  std::shared_lock lock(mu_);
  return map_.size();
}

}  // namespace dispex
