#include "dispex/explanation_miner.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>

#include "dispex/errors.hpp"
#include "dispex/kernels.hpp"

namespace dispex {

std::string DisparityExplanation::key() const {
  return subpopulation.pattern.to_string() + " | " + treatment.to_string();
}

double disparity_score(const CateEstimate& cate_g1, const CateEstimate& cate_g2,
                       double max_abs_outcome) {
  return std::fabs(cate_g1.value - cate_g2.value) / max_abs_outcome;
}

bool direction_consistent(const CateEstimate& cate_g1, const CateEstimate& cate_g2,
                          DirectionMode direction) {
  switch (direction) {
    case DirectionMode::G1Above: return cate_g1.value > cate_g2.value;
    case DirectionMode::G1Below: return cate_g1.value < cate_g2.value;
    case DirectionMode::ReverseOfGlobal: break;
  }
  throw std::invalid_argument("direction must be resolved before checking consistency");
}

ExplanationMiner::ExplanationMiner(const Dataset& ds, CausalDag dag, const GroupContext& groups,
                                   MinerConfig cfg)
    : ds_(ds), dag_(std::move(dag)), dag_fp_(dag_fingerprint(dag_)), groups_(groups), cfg_(cfg) {
  if (cfg_.max_treatment_predicates < 1) throw InputError("max_treatment_predicates must be >= 1");
  if (cfg_.beam_width < 1) throw InputError("beam_width must be >= 1");
  if (!(ds_.max_abs_outcome() > 0.0)) throw InputError("outcome is identically zero");
  cfg_.sampling.seed = cfg_.seed;
  for (auto a : ds_.attributes_of_kind(AttributeKind::Mutable)) {
    const auto& schema = ds_.attribute(a);
    if (!dag_.has_node(schema.name)) {
      throw DagError("mutable attribute '" + schema.name + "' is not a DAG node");
    }
    for (std::size_t c = 0; c < schema.domain.size(); ++c) {
      Candidate cand;
      cand.treatment = Pattern({{schema.name, Op::Equals, schema.domain[c]}});
      cand.items = {{a, static_cast<std::int32_t>(c)}};
      cand.treated = ds_.item(a, static_cast<std::int32_t>(c));
      singles_.push_back(std::move(cand));
    }
  }
}

AdjustmentSet ExplanationMiner::adjustment_for(const Pattern& treatment) const {
  std::string key = std::to_string(dag_fp_);
  for (const auto& a : treatment.attributes()) key += "|" + a;
  auto compute = [&] {
    const auto spliced = insert_treatment_node(dag_, treatment);
    return backdoor_adjustment_set(spliced, treatment_node_name(treatment), ds_.outcome_name());
  };
  if (!cfg_.use_cache) return compute();
  std::lock_guard lock(adj_mu_);
  auto it = adj_cache_.find(key);
  if (it != adj_cache_.end()) return it->second;
  auto adj = compute();
  adj_cache_.emplace(key, adj);
  return adj;
}

bool ExplanationMiner::has_overlap(const TupleSet& slice, std::size_t slice_size,
                                   const TupleSet& treated) const {
  const auto n_t = slice.intersect_count(treated);
  const auto min_arm = cfg_.sampling.min_arm;
  return n_t >= min_arm && slice_size - n_t >= min_arm;
}

std::optional<CateEstimate> ExplanationMiner::estimate(const Scope& scope,
                                                       const Candidate& cand) const {
  const auto adj = adjustment_for(cand.treatment);
  std::string key;
  if (cfg_.use_cache) {
    key = scope.key + "|" + cand.treatment.to_string() + "|";
    for (const auto& c : adj.confounders) key += c + ",";
    key += "|" + std::to_string(cfg_.sampling.seed);
    if (auto hit = cache_.find(key)) {
      if (hit->failure != EstimateCache::Failure::None) return std::nullopt;
      return hit->estimate;
    }
  }

  std::vector<std::size_t> attrs;
  for (const auto& name : adj.confounders) attrs.push_back(ds_.index_of(name));
  std::sort(attrs.begin(), attrs.end(), [&](auto a, auto b) {
    return ds_.attribute(a).name < ds_.attribute(b).name;
  });
  std::vector<std::uint8_t> indicator(scope.rows.size());
  for (std::size_t i = 0; i < scope.rows.size(); ++i) {
    indicator[i] = cand.treated.contains(scope.rows[i]) ? 1 : 0;
  }

  EstimateCache::Entry entry;
  try {
    entry.estimate = estimate_cate_rows(ds_, scope.rows, indicator, attrs, cfg_.sampling);
  } catch (const InsufficientOverlap&) {
    entry.failure = EstimateCache::Failure::InsufficientOverlap;
  } catch (const SingularDesign&) {
    entry.failure = EstimateCache::Failure::SingularDesign;
  }
  estimates_computed_.fetch_add(1, std::memory_order_relaxed);
  if (cfg_.use_cache) cache_.insert(key, entry);
  if (entry.failure != EstimateCache::Failure::None) return std::nullopt;
  return entry.estimate;
}

namespace {

struct Scored {
  std::size_t candidate;
  CateEstimate c1;
  CateEstimate c2;
  double delta;
};

}  // namespace

SubpopulationSearch ExplanationMiner::search(const Subpopulation& sub) const {
  SubpopulationSearch result;
  const auto sub_key = sub.pattern.to_string();
  const Scope s1{sub_key + "#g1", sub.tuples_g1.ids(), &sub.tuples_g1};
  const Scope s2{sub_key + "#g2", sub.tuples_g2.ids(), &sub.tuples_g2};
  const auto direction = resolve_direction(cfg_.mode, sub);

  std::vector<Candidate> pool;  // every candidate touched, indexed by Scored::candidate
  auto evaluate = [&](Candidate cand) -> std::optional<Scored> {
    if (!has_overlap(*s1.tuples, s1.rows.size(), cand.treated) ||
        !has_overlap(*s2.tuples, s2.rows.size(), cand.treated)) {
      return std::nullopt;
    }
    ++result.candidates_estimated;
    pool.push_back(std::move(cand));
    const auto& c = pool.back();
    auto e1 = estimate(s1, c);
    if (!e1 || !e1->significant) return std::nullopt;
    auto e2 = estimate(s2, c);
    if (!e2 || !e2->significant) return std::nullopt;
    if (!direction_consistent(*e1, *e2, direction)) return std::nullopt;
    return Scored{pool.size() - 1, *e1, *e2, disparity_score(*e1, *e2, ds_.max_abs_outcome())};
  };
  auto better = [&](const Scored& a, const Scored& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    return pool[a.candidate].treatment.to_string() < pool[b.candidate].treatment.to_string();
  };
  auto combine = [](const Candidate& a, const Candidate& b) {
    Candidate c;
    c.treatment = a.treatment.conjoin(b.treatment);
    c.items = a.items;
    c.items.insert(c.items.end(), b.items.begin(), b.items.end());
    std::sort(c.items.begin(), c.items.end());
    c.treated = a.treated & b.treated;
    return c;
  };
  auto uses_attr = [](const Candidate& c, std::size_t attr) {
    return std::any_of(c.items.begin(), c.items.end(), [&](auto& it) { return it.first == attr; });
  };

  std::vector<Scored> all_survivors;
  std::vector<Scored> survivors;
  for (const auto& single : singles_) {
    if (auto s = evaluate(single)) survivors.push_back(*s);
  }
  std::sort(survivors.begin(), survivors.end(), better);
  all_survivors = survivors;
  const std::vector<Scored> level1 = survivors;

  // Exhaustive mode tracks every candidate of the previous level, not just survivors.
  std::vector<Candidate> exhaustive_level;
  if (cfg_.exhaustive) exhaustive_level = singles_;

  for (std::size_t width = 2; width <= cfg_.max_treatment_predicates; ++width) {
    std::vector<Candidate> next;
    std::set<std::string> seen;
    if (cfg_.exhaustive) {
      for (const auto& base : exhaustive_level) {
        const auto max_attr = base.items.back().first;
        for (const auto& single : singles_) {
          const auto attr = single.items.front().first;
          if (attr <= max_attr || uses_attr(base, attr)) continue;
          next.push_back(combine(base, single));
        }
      }
      exhaustive_level = next;
    } else {
      const auto base_n = std::min(cfg_.beam_width, survivors.size());
      const auto ext_n = std::min(cfg_.beam_width, level1.size());
      // Copy the beam out of the pool: evaluate() appends to it.
      std::vector<Candidate> base;
      std::vector<Candidate> ext;
      for (std::size_t i = 0; i < base_n; ++i) base.push_back(pool[survivors[i].candidate]);
      for (std::size_t i = 0; i < ext_n; ++i) ext.push_back(pool[level1[i].candidate]);
      for (const auto& b : base) {
        for (const auto& e : ext) {
          if (uses_attr(b, e.items.front().first)) continue;
          auto c = combine(b, e);
          if (seen.insert(c.treatment.to_string()).second) next.push_back(std::move(c));
        }
      }
    }
    survivors.clear();
    for (auto& c : next) {
      if (auto s = evaluate(std::move(c))) survivors.push_back(*s);
    }
    std::sort(survivors.begin(), survivors.end(), better);
    all_survivors.insert(all_survivors.end(), survivors.begin(), survivors.end());
    if (!cfg_.exhaustive && survivors.empty()) break;
  }

  if (all_survivors.empty()) return result;
  const auto best = *std::min_element(all_survivors.begin(), all_survivors.end(), better);
  DisparityExplanation exp;
  exp.subpopulation = sub;
  exp.treatment = pool[best.candidate].treatment;
  exp.cate_g1 = best.c1;
  exp.cate_g2 = best.c2;
  exp.delta = best.delta;
  exp.support = sub.support;
  result.best = std::move(exp);
  return result;
}

namespace {

void sort_canonical(std::vector<DisparityExplanation>& exps) {
  std::vector<std::string> keys;
  std::vector<std::size_t> order(exps.size());
  for (std::size_t i = 0; i < exps.size(); ++i) {
    order[i] = i;
    keys.push_back(exps[i].key());
  }
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    if (exps[a].delta != exps[b].delta) return exps[a].delta > exps[b].delta;
    return keys[a] < keys[b];
  });
  std::vector<DisparityExplanation> out;
  out.reserve(exps.size());
  for (auto i : order) out.push_back(std::move(exps[i]));
  exps = std::move(out);
}

}  // namespace

std::vector<DisparityExplanation> ExplanationMiner::mine_all_serial(
    const std::vector<Subpopulation>& subs) const {
  std::vector<DisparityExplanation> out;
  for (const auto& s : subs) {
    if (auto r = search(s).best) out.push_back(std::move(*r));
  }
  sort_canonical(out);
  return out;
}

std::vector<DisparityExplanation> ExplanationMiner::mine_all(
    const std::vector<Subpopulation>& subs) const {
  std::vector<std::optional<DisparityExplanation>> results(subs.size());
  std::vector<std::exception_ptr> errors(subs.size());
  const auto n = static_cast<std::ptrdiff_t>(subs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(kernels::resolve_workers(cfg_.workers))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      results[idx] = search(subs[idx]).best;
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<DisparityExplanation> out;
  for (auto& r : results) {
    if (r) out.push_back(std::move(*r));
  }
  sort_canonical(out);
  return out;
}

std::optional<CateEstimate> ExplanationMiner::global_effect(const Pattern& treatment,
                                                            bool for_g1) const {
  const TupleSet& slice = for_g1 ? groups_.g1 : groups_.g2;
  const Scope scope{for_g1 ? "<global>#g1" : "<global>#g2", slice.ids(), &slice};
  Candidate cand;
  cand.treatment = treatment;
  cand.treated = evaluate_pattern(ds_, treatment);
  return estimate(scope, cand);
}

std::optional<DisparityExplanation> mine_treatments_for_subpopulation(
    const Dataset& ds, const CausalDag& dag, const GroupContext& groups, const Subpopulation& sub,
    const MinerConfig& cfg) {
  return ExplanationMiner(ds, dag, groups, cfg).search(sub).best;
}

std::vector<DisparityExplanation> mine_all(const Dataset& ds, const CausalDag& dag,
                                           const GroupContext& groups,
                                           const std::vector<Subpopulation>& subs,
                                           const MinerConfig& cfg) {
  return ExplanationMiner(ds, dag, groups, cfg).mine_all(subs);
}

}  // namespace dispex
