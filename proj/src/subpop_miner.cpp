#include "dispex/subpop_miner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "dispex/errors.hpp"
#include "dispex/kernels.hpp"

namespace dispex {

GroupContext GroupContext::build(const Dataset& ds, const Pattern& g1, const Pattern& g2) {
  GroupContext ctx;
  ctx.g1_pattern = g1;
  ctx.g2_pattern = g2;
  ctx.g1 = evaluate_pattern(ds, g1);
  ctx.g2 = evaluate_pattern(ds, g2);
  ctx.d_union = ctx.g1 | ctx.g2;
  return ctx;
}

Subpopulation make_subpopulation(const Dataset& ds, const GroupContext& groups, Pattern pattern,
                                 TupleSet tuples) {
  Subpopulation s;
  s.pattern = std::move(pattern);
  s.tuples_g1 = tuples & groups.g1;
  s.tuples_g2 = tuples & groups.g2;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.avg_g1 = s.tuples_g1.empty() ? nan : group_average(ds, s.tuples_g1);
  s.avg_g2 = s.tuples_g2.empty() ? nan : group_average(ds, s.tuples_g2);
  s.support = support_fraction(tuples.intersect_count(groups.d_union), ds.size());
  s.tuples = std::move(tuples);
  return s;
}

DirectionMode parse_direction_mode(std::string_view text) {
  if (text == "g1_above") return DirectionMode::G1Above;
  if (text == "g1_below") return DirectionMode::G1Below;
  if (text == "reverse_of_global") return DirectionMode::ReverseOfGlobal;
  throw InputError("unknown direction mode '" + std::string(text) + "'");
}

std::string_view to_string(DirectionMode mode) {
  switch (mode) {
    case DirectionMode::G1Above: return "g1_above";
    case DirectionMode::G1Below: return "g1_below";
    case DirectionMode::ReverseOfGlobal: return "reverse_of_global";
  }
  return "?";
}

namespace {

struct Item {
  std::size_t attr;
  std::int32_t code;
  std::string attr_name;
  std::string value;
};

struct Itemset {
  std::vector<std::size_t> items;  // indices into the item table, ascending
  TupleSet tuples;
};

}  // namespace

std::vector<Subpopulation> mine_frequent_subpopulations(const Dataset& ds, double sigma,
                                                        const GroupContext& groups,
                                                        const SubpopMinerOptions& opts) {
  if (!(sigma > 0.0) || sigma > 1.0) throw InputError("sigma must lie in (0, 1]");
  const double n = static_cast<double>(ds.size());
  auto frequent = [&](std::size_t count) { return static_cast<double>(count) / n >= sigma; };

  // Items in canonical (attribute name, value text) order, so itemsets are
  // sorted exactly as their patterns serialize.
  std::vector<Item> items;
  for (auto a : ds.attributes_of_kind(AttributeKind::Immutable)) {
    const auto& schema = ds.attribute(a);
    for (std::size_t c = 0; c < schema.domain.size(); ++c) {
      items.push_back({a, static_cast<std::int32_t>(c), schema.name, schema.domain[c]});
    }
  }
  std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
    return std::tie(x.attr_name, x.value) < std::tie(y.attr_name, y.value);
  });

  std::vector<Itemset> all;
  std::vector<Itemset> level;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& set = ds.item(items[i].attr, items[i].code);
    if (frequent(set.count())) level.push_back({{i}, set});
  }

  std::size_t k = 2;
  while (!level.empty()) {
    for (const auto& s : level) all.push_back(s);
    if (opts.max_predicates != 0 && k > opts.max_predicates) break;

    std::set<std::vector<std::size_t>> prev;
    for (const auto& s : level) prev.insert(s.items);

    // Join pairs sharing the first k-2 items; last items must come from
    // different attributes (two equalities on one attribute select nothing).
    std::vector<std::pair<std::size_t, std::size_t>> cand;  // (lhs itemset, rhs item)
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (std::size_t j = i + 1; j < level.size(); ++j) {
        const auto& a = level[i].items;
        const auto& b = level[j].items;
        if (!std::equal(a.begin(), a.end() - 1, b.begin())) break;
        if (items[a.back()].attr == items[b.back()].attr) continue;
        std::vector<std::size_t> joined = a;
        joined.push_back(b.back());
        bool closed = true;
        for (std::size_t drop = 0; drop + 2 < joined.size() && closed; ++drop) {
          std::vector<std::size_t> sub;
          for (std::size_t t = 0; t < joined.size(); ++t) {
            if (t != drop) sub.push_back(joined[t]);
          }
          closed = prev.count(sub) > 0;
        }
        if (closed) cand.emplace_back(i, b.back());
      }
    }

    std::vector<kernels::JoinRequest> joins;
    joins.reserve(cand.size());
    for (const auto& [i, item] : cand) {
      joins.push_back({&level[i].tuples, &ds.item(items[item].attr, items[item].code)});
    }
    const auto counts = opts.parallel ? kernels::intersect_counts_parallel(joins, opts.workers)
                                      : kernels::intersect_counts_serial(joins);

    std::vector<Itemset> next;
    for (std::size_t c = 0; c < cand.size(); ++c) {
      if (!frequent(counts[c])) continue;
      const auto& [i, item] = cand[c];
      Itemset s;
      s.items = level[i].items;
      s.items.push_back(item);
      s.tuples = level[i].tuples & ds.item(items[item].attr, items[item].code);
      next.push_back(std::move(s));
    }
    level = std::move(next);
    ++k;
  }

  std::vector<Subpopulation> out;
  out.reserve(all.size());
  for (auto& s : all) {
    std::vector<Predicate> preds;
    for (auto i : s.items) preds.push_back({items[i].attr_name, Op::Equals, items[i].value});
    out.push_back(make_subpopulation(ds, groups, Pattern(std::move(preds)), std::move(s.tuples)));
  }
  std::sort(out.begin(), out.end(), [](const Subpopulation& a, const Subpopulation& b) {
    return a.pattern.to_string() < b.pattern.to_string();
  });
  return out;
}

DirectionMode resolve_direction(DirectionMode mode, const Subpopulation& sub) {
  if (mode != DirectionMode::ReverseOfGlobal) return mode;
  return sub.avg_g1 > sub.avg_g2 ? DirectionMode::G1Above : DirectionMode::G1Below;
}

std::vector<Subpopulation> scenario_filter(std::vector<Subpopulation> subs, DirectionMode mode,
                                           double global_avg_g1, double global_avg_g2,
                                           std::size_t min_arm) {
  const double global_gap = global_avg_g1 - global_avg_g2;
  std::vector<Subpopulation> out;
  for (auto& s : subs) {
    if (s.size_g1() < min_arm || s.size_g2() < min_arm) continue;
    const double gap = s.avg_g1 - s.avg_g2;
    bool keep = false;
    switch (mode) {
      case DirectionMode::G1Above: keep = gap > 0; break;
      case DirectionMode::G1Below: keep = gap < 0; break;
      case DirectionMode::ReverseOfGlobal:
        keep = (global_gap > 0 && gap < 0) || (global_gap < 0 && gap > 0);
        break;
    }
    if (keep) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace dispex
