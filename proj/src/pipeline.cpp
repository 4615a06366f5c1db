#include "dispex/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>

#include "dispex/errors.hpp"
#include "dispex/kernels.hpp"

namespace dispex {

SelectorKind parse_selector(std::string_view text) {
  if (text == "greedy") return SelectorKind::Greedy;
  if (text == "brute_force") return SelectorKind::BruteForce;
  if (text == "topk") return SelectorKind::TopK;
  throw InputError("unknown selector '" + std::string(text) + "' (greedy, brute_force, topk)");
}

std::string_view to_string(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::Greedy: return "greedy";
    case SelectorKind::BruteForce: return "brute_force";
    case SelectorKind::TopK: return "topk";
  }
  return "greedy";
}

namespace {

using Clock = std::chrono::steady_clock;

// Runs one stage, records its wall time and tags escaping errors.
template <typename F>
auto timed_stage(const char* name, std::vector<StageTiming>& timings, F&& fn) {
  const auto start = Clock::now();
  auto record = [&] {
    timings.push_back({name, std::chrono::duration<double>(Clock::now() - start).count()});
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record();
    } else {
      auto out = fn();
      record();
      return out;
    }
  } catch (const StageError&) {
    throw;
  } catch (const InputError& e) {
    throw StageError(name, e.what(), true);
  } catch (const CombinatorialGuard& e) {
    throw StageError(name, e.what(), true);
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), false);
  }
}

struct Prepared {
  GroupContext groups;
  double avg_g1 = 0.0;
  double avg_g2 = 0.0;
};

Prepared prepare_groups(const Dataset& ds, const PipelineConfig& cfg) {
  Prepared p{GroupContext::build(ds, Pattern::parse(cfg.g1), Pattern::parse(cfg.g2))};
  if (p.groups.g1.empty()) throw InputError("group g1 '" + cfg.g1 + "' matches no tuples");
  if (p.groups.g2.empty()) throw InputError("group g2 '" + cfg.g2 + "' matches no tuples");
  p.avg_g1 = group_average(ds, p.groups.g1);
  p.avg_g2 = group_average(ds, p.groups.g2);
  return p;
}

std::vector<Subpopulation> filter_subpopulations(std::vector<Subpopulation> mined,
                                                 const PipelineConfig& cfg, double avg_g1,
                                                 double avg_g2) {
  std::erase_if(mined, [&](const Subpopulation& s) { return s.support < cfg.sigma; });
  return scenario_filter(std::move(mined), cfg.mode, avg_g1, avg_g2, cfg.min_arm);
}

SubpopMinerOptions subpop_options(const PipelineConfig& cfg) {
  SubpopMinerOptions o;
  o.max_predicates = cfg.max_subpop_predicates;
  o.workers = kernels::resolve_workers(cfg.workers);
  return o;
}

void warn_outcome_feedback(const CausalDag& dag, const Dataset& ds) {
  for (const auto& child : dag.children(ds.outcome_name())) {
    const auto idx = ds.find(child);
    if (idx && ds.attribute(*idx).kind == AttributeKind::Mutable) {
      std::cerr << "warning: outcome '" << ds.outcome_name() << "' has an edge into mutable '"
                << child << "'; adjustment sets ignore it\n";
    }
  }
}

}  // namespace

CausalDag align_dag(const CausalDag& dag, const Dataset& ds) {
  for (const auto& node : dag.nodes()) {
    if (node != ds.outcome_name() && !ds.find(node)) {
      throw InputError("DAG node '" + node + "' is neither an attribute nor the outcome");
    }
  }
  std::vector<std::string> extra{ds.outcome_name()};
  for (const auto& a : ds.schema()) extra.push_back(a.name);
  return dag.with_nodes(extra);
}

SubpopulationListing list_subpopulations(const Dataset& ds, const PipelineConfig& cfg) {
  cfg.validate();
  auto prep = prepare_groups(ds, cfg);
  SubpopulationListing out;
  out.mined = mine_frequent_subpopulations(ds, cfg.sigma, prep.groups, subpop_options(cfg));
  out.filtered = filter_subpopulations(out.mined, cfg, prep.avg_g1, prep.avg_g2);
  out.global_avg_g1 = prep.avg_g1;
  out.global_avg_g2 = prep.avg_g2;
  return out;
}

namespace {

ExplanationReport run_stages(const Dataset& ds, const CausalDag& raw_dag, const PipelineConfig& cfg,
                             std::vector<StageTiming> timings) {
  const int workers = kernels::resolve_workers(cfg.workers);

  auto [dag, prep] = timed_stage("prepare", timings, [&] {
    cfg.validate();
    auto aligned = align_dag(raw_dag, ds);
    warn_outcome_feedback(aligned, ds);
    return std::make_pair(std::move(aligned), prepare_groups(ds, cfg));
  });
  const GroupContext& groups = prep.groups;

  auto mined = timed_stage("subpopulations", timings, [&] {
    return mine_frequent_subpopulations(ds, cfg.sigma, groups, subpop_options(cfg));
  });
  const std::size_t n_mined = mined.size();

  auto filtered = timed_stage("scenario_filter", timings, [&] {
    return filter_subpopulations(std::move(mined), cfg, prep.avg_g1, prep.avg_g2);
  });

  MinerConfig mcfg;
  mcfg.max_treatment_predicates = cfg.max_treatment_predicates;
  mcfg.beam_width = cfg.beam_width;
  mcfg.workers = workers;
  mcfg.seed = cfg.seed;
  mcfg.mode = cfg.mode;
  mcfg.sampling.max_rows = cfg.max_rows;
  mcfg.sampling.min_arm = cfg.min_arm;
  mcfg.sampling.alpha = cfg.alpha;
  mcfg.exhaustive = cfg.exhaustive_treatments;

  std::optional<ExplanationMiner> miner;
  auto exps = timed_stage("explanations", timings, [&] {
    miner.emplace(ds, dag, groups, mcfg);
    return miner->mine_all(filtered);
  });

  SelectorConfig scfg;
  scfg.k = cfg.k;
  scfg.tau = cfg.tau;
  scfg.num_clusters = cfg.num_clusters;
  scfg.sigma = cfg.sigma;
  scfg.seed = cfg.seed;
  scfg.linkage = cfg.linkage;
  scfg.force_brute_force = cfg.force_brute_force;
  scfg.workers = workers;

  auto selected = timed_stage("selection", timings, [&] {
    switch (cfg.selector) {
      case SelectorKind::BruteForce: return brute_force_select(exps, scfg, groups.d_union);
      case SelectorKind::TopK: return topk_select(exps, cfg.k, groups.d_union);
      case SelectorKind::Greedy: break;
    }
    return greedy_select(exps, scfg, groups.d_union);
  });

  ExplanationReport report;
  timed_stage("global_effects", timings, [&] {
    auto chosen = selected.chosen;
    std::sort(chosen.begin(), chosen.end(), [](const auto& a, const auto& b) {
      if (a.delta != b.delta) return a.delta > b.delta;
      return a.key() < b.key();
    });
    for (const auto& e : chosen) {
      ReportRow row;
      row.subpopulation = e.subpopulation.pattern.to_string();
      row.treatment = e.treatment.to_string();
      row.support = e.support;
      row.avg_g1 = e.subpopulation.avg_g1;
      row.avg_g2 = e.subpopulation.avg_g2;
      row.cate_g1 = e.cate_g1;
      row.cate_g2 = e.cate_g2;
      row.global_cate_g1 = miner->global_effect(e.treatment, true);
      row.global_cate_g2 = miner->global_effect(e.treatment, false);
      row.delta = e.delta;
      report.rows.push_back(std::move(row));
    }
  });

  report.selector = std::string(to_string(cfg.selector));
  report.objective = selected.objective;
  report.note = selected.note;
  report.config_echo = config_to_json(cfg);
  report.seed = cfg.seed;
  report.n_tuples = ds.size();
  report.n_g1 = groups.g1.count();
  report.n_g2 = groups.g2.count();
  report.global_avg_g1 = prep.avg_g1;
  report.global_avg_g2 = prep.avg_g2;
  report.n_subpopulations = n_mined;
  report.n_filtered = filtered.size();
  report.n_candidates = exps.size();
  report.timings = std::move(timings);
  return report;
}

}  // namespace

ExplanationReport run_on(const Dataset& ds, const CausalDag& dag, const PipelineConfig& cfg) {
  return run_stages(ds, dag, cfg, {});
}

ExplanationReport run(const PipelineConfig& cfg) {
  std::vector<StageTiming> timings;
  auto [ds, dag] = timed_stage("load", timings, [&] {
    cfg.validate();
    if (cfg.dataset.empty()) throw InputError("dataset path is not set");
    if (cfg.dag.empty()) throw InputError("dag path is not set");
    SchemaConfig schema;
    schema.kinds = cfg.attributes;
    schema.kinds[cfg.outcome] = AttributeKind::Outcome;
    schema.bins = cfg.bins;
    return std::make_pair(load_csv(cfg.dataset, schema), load_dag(cfg.dag));
  });
  return run_stages(ds, dag, cfg, std::move(timings));
}

}  // namespace dispex
