#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "dispex/errors.hpp"
#include "dispex/selector.hpp"
#include "fixtures.hpp"

using namespace dispex;

namespace {

std::set<std::size_t> ids_in(const TupleSet& t, const TupleSet& d_union) {
  const auto v = (t & d_union).ids();
  return {v.begin(), v.end()};
}

Clusters normalized(Clusters c) {
  for (auto& m : c) std::sort(m.begin(), m.end());
  std::sort(c.begin(), c.end());
  return c;
}

std::vector<double> oracle_distances(const fixture::SelectionInstance& inst) {
  const auto n = inst.exps.size();
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d[i * n + j] = 1.0 - oracle::jaccard(ids_in(inst.exps[i].subpopulation.tuples, inst.d_union),
                                           ids_in(inst.exps[j].subpopulation.tuples, inst.d_union));
    }
  }
  return d;
}

double oracle_optimum(const fixture::SelectionInstance& inst, const SelectorConfig& cfg) {
  std::vector<double> score;
  for (const auto& e : inst.exps) score.push_back(e.delta);
  return oracle::best_subset(
      score, cfg.k, [&](std::size_t i) { return inst.exps[i].support >= cfg.sigma; },
      [&](std::size_t i, std::size_t j) {
        return oracle::jaccard(ids_in(inst.exps[i].subpopulation.tuples, inst.d_union),
                               ids_in(inst.exps[j].subpopulation.tuples, inst.d_union)) <= cfg.tau;
      });
}

fixture::SelectionInstance windows(const std::vector<std::pair<std::size_t, std::size_t>>& spans,
                                   std::size_t n = 100) {
  fixture::SelectionInstance inst{{}, TupleSet(n, true)};
  for (std::size_t i = 0; i < spans.size(); ++i) {
    TupleSet t(n);
    for (auto j = spans[i].first; j < spans[i].second; ++j) t.insert(j);
    inst.exps.push_back(fixture::make_exp("w" + std::to_string(i), t, 0.1 * (i + 1), inst.d_union));
  }
  return inst;
}

}  // namespace

TEST(JaccardSim, HandExamples) {
  const TupleSet all(10, true);
  auto e = [&](std::vector<std::size_t> ids) {
    return fixture::make_exp("x", TupleSet::from_ids(10, ids), 0.1, all);
  };
  EXPECT_DOUBLE_EQ(jaccard_sim(e({1, 2, 3}), e({1, 2, 3}), all), 1.0);
  EXPECT_DOUBLE_EQ(jaccard_sim(e({1, 2}), e({5, 6}), all), 0.0);
  EXPECT_DOUBLE_EQ(jaccard_sim(e({1, 2, 3}), e({2, 3, 4}), all), 0.5);
  // Tuples outside d_union are ignored.
  const auto d = TupleSet::from_ids(10, {2, 3});
  EXPECT_DOUBLE_EQ(jaccard_sim(e({1, 2, 3}), e({2, 3, 4}), d), 1.0);
}

TEST(JaccardSim, MetricPropertiesOnRandomSets) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = fixture::random_selection_instance(rng, 6, 120);
    const auto& x = inst.exps;
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_DOUBLE_EQ(jaccard_sim(x[i], x[i], inst.d_union), 1.0);
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double sij = jaccard_sim(x[i], x[j], inst.d_union);
        EXPECT_DOUBLE_EQ(sij, jaccard_sim(x[j], x[i], inst.d_union));
        EXPECT_DOUBLE_EQ(sij, oracle::jaccard(ids_in(x[i].subpopulation.tuples, inst.d_union),
                                              ids_in(x[j].subpopulation.tuples, inst.d_union)));
        for (std::size_t k = 0; k < x.size(); ++k) {
          const double dik = 1 - jaccard_sim(x[i], x[k], inst.d_union);
          const double dkj = 1 - jaccard_sim(x[k], x[j], inst.d_union);
          EXPECT_LE(1 - sij, dik + dkj + 1e-12);
        }
      }
    }
  }
}

TEST(Clustering, FewCandidatesGiveSingletons) {
  std::mt19937_64 rng(1);
  const auto inst = fixture::random_selection_instance(rng, 4);
  const auto c = cluster_explanations(inst.exps, 10, inst.d_union);
  EXPECT_EQ(normalized(c), (Clusters{{0}, {1}, {2}, {3}}));
}

TEST(Clustering, IdenticalGroupsBipartition) {
  const auto inst = windows({{0, 30}, {60, 90}, {0, 30}, {60, 90}, {0, 30}});
  EXPECT_EQ(normalized(cluster_explanations(inst.exps, 2, inst.d_union)),
            (Clusters{{0, 2, 4}, {1, 3}}));
}

TEST(Clustering, MatchesNaiveReferenceForEveryLinkage) {
  std::mt19937_64 rng(2024);
  const std::pair<Linkage, char> linkages[] = {
      {Linkage::Average, 'a'}, {Linkage::Single, 's'}, {Linkage::Complete, 'c'}};
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = 3 + uniform_below(rng, 18);
    const auto inst = fixture::random_selection_instance(rng, m);
    const auto dist = oracle_distances(inst);
    const auto k = 1 + uniform_below(rng, m);
    for (const auto& [linkage, code] : linkages) {
      EXPECT_EQ(normalized(cluster_explanations(inst.exps, k, inst.d_union, linkage)),
                oracle::naive_cluster(dist, m, k, code))
          << "trial " << trial << " linkage " << code;
    }
  }
}

TEST(GreedySelect, DisjointCandidatesAllChosen) {
  const auto inst = windows({{0, 20}, {20, 40}, {40, 60}, {60, 80}});
  SelectorConfig cfg;
  cfg.k = 4;
  const auto r = greedy_select(inst.exps, cfg, inst.d_union);
  EXPECT_EQ(r.chosen.size(), 4u);
  EXPECT_NEAR(r.objective, 0.1 + 0.2 + 0.3 + 0.4, 1e-12);
  EXPECT_TRUE(r.note.empty());
}

TEST(GreedySelect, IdenticalSubpopulationsChooseOne) {
  const auto inst = windows({{0, 50}, {0, 50}, {0, 50}});
  SelectorConfig cfg;
  cfg.tau = 0.9;
  const auto r = greedy_select(inst.exps, cfg, inst.d_union);
  EXPECT_EQ(r.chosen.size(), 1u);
  EXPECT_FALSE(r.note.empty());
}

TEST(GreedySelect, SupportFloorIsEnforced) {
  auto inst = windows({{0, 2}, {10, 60}});  // first has support 0.02
  SelectorConfig cfg;
  cfg.sigma = 0.05;
  for (const auto& r : {greedy_select(inst.exps, cfg, inst.d_union),
                        brute_force_select(inst.exps, cfg, inst.d_union)}) {
    ASSERT_EQ(r.chosen.size(), 1u);
    EXPECT_EQ(r.chosen[0].subpopulation.pattern.to_string(), "S=w1");
  }
}

TEST(GreedySelect, FeasibleDeterministicAndBelowOptimum) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = fixture::random_selection_instance(rng, 2 + uniform_below(rng, 12));
    SelectorConfig cfg;
    cfg.k = 1 + uniform_below(rng, 4);
    cfg.tau = 0.2 + 0.6 * uniform01(rng);
    cfg.seed = static_cast<std::uint64_t>(trial);
    cfg.resample_rejected = trial % 2 == 1;
    cfg.distance = trial % 3 == 0 ? ClusterDistance::SymmetricDifference : ClusterDistance::Jaccard;
    const auto g = greedy_select(inst.exps, cfg, inst.d_union);
    EXPECT_TRUE(is_feasible(g, cfg, inst.d_union));
    const auto again = greedy_select(inst.exps, cfg, inst.d_union);
    EXPECT_EQ(g.objective, again.objective);
    const auto b = brute_force_select(inst.exps, cfg, inst.d_union);
    EXPECT_TRUE(is_feasible(b, cfg, inst.d_union));
    EXPECT_LE(g.objective, b.objective + 1e-12);
    EXPECT_NEAR(b.objective, oracle_optimum(inst, cfg), 1e-12);
    const auto t = topk_select(inst.exps, cfg.k, inst.d_union);
    EXPECT_GE(t.objective + 1e-12, b.objective);
  }
}

TEST(GreedySelect, SevenSeedSpread) {
  std::mt19937_64 rng(31337);
  const auto inst = fixture::random_selection_instance(rng, 14);
  SelectorConfig cfg;
  cfg.k = 4;
  cfg.tau = 0.4;
  cfg.num_clusters = 6;
  const double opt = brute_force_select(inst.exps, cfg, inst.d_union).objective;
  std::vector<double> ratios;
  for (std::uint64_t seed : {1u, 7u, 13u, 42u, 99u, 123u, 2024u}) {
    cfg.seed = seed;
    const auto g = greedy_select(inst.exps, cfg, inst.d_union);
    EXPECT_TRUE(is_feasible(g, cfg, inst.d_union));
    ratios.push_back(g.objective / opt);
  }
  const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / 7.0;
  double var = 0.0;
  for (double r : ratios) var += (r - mean) * (r - mean);
  RecordProperty("mean_ratio", std::to_string(mean));
  RecordProperty("stddev_ratio", std::to_string(std::sqrt(var / 6.0)));
  EXPECT_GT(mean, 0.0);
  EXPECT_LE(mean, 1.0 + 1e-12);
}

TEST(BruteForceSelect, SmallSatisfiableReturnsAll) {
  const auto inst = windows({{0, 20}, {30, 50}});
  SelectorConfig cfg;
  cfg.k = 3;
  const auto r = brute_force_select(inst.exps, cfg, inst.d_union);
  EXPECT_EQ(r.chosen.size(), 2u);
  EXPECT_NEAR(r.objective, 0.3, 1e-12);
}

TEST(BruteForceSelect, GuardRefusesHugeSearch) {
  std::mt19937_64 rng(3);
  const auto inst = fixture::random_selection_instance(rng, 200, 400);
  SelectorConfig cfg;
  cfg.k = 4;
  EXPECT_THROW(brute_force_select(inst.exps, cfg, inst.d_union), CombinatorialGuard);
}

TEST(TopKSelect, OrderingAndEdges) {
  const auto inst = windows({{0, 50}, {0, 50}, {10, 60}});
  const auto all = topk_select(inst.exps, 5, inst.d_union);
  ASSERT_EQ(all.chosen.size(), 3u);
  EXPECT_GE(all.chosen[0].delta, all.chosen[1].delta);
  EXPECT_GE(all.chosen[1].delta, all.chosen[2].delta);
  const auto one = topk_select(inst.exps, 1, inst.d_union);
  ASSERT_EQ(one.chosen.size(), 1u);
  EXPECT_EQ(one.chosen[0].subpopulation.pattern.to_string(), "S=w2");
}

TEST(Linkage, Parse) {
  EXPECT_EQ(parse_linkage("single"), Linkage::Single);
  EXPECT_EQ(parse_linkage("complete"), Linkage::Complete);
  EXPECT_EQ(parse_linkage("average"), Linkage::Average);
  EXPECT_THROW(parse_linkage("ward"), InputError);
}
