#include <gtest/gtest.h>

#include <cmath>

#include "dispex/errors.hpp"
#include "dispex/subpop_miner.hpp"
#include "fixtures.hpp"

using namespace dispex;

namespace {

std::set<std::string> mined_strings(const std::vector<Subpopulation>& subs) {
  std::set<std::string> out;
  for (const auto& s : subs) out.insert(s.pattern.to_string());
  return out;
}

GroupContext random_groups(const Dataset& ds) {
  return GroupContext::build(ds, Pattern::parse("G=a"), Pattern::parse("G=b"));
}

Subpopulation with_averages(const std::string& name, double g1, double g2, std::size_t size = 50) {
  Subpopulation s;
  s.pattern = Pattern::parse("S=" + name);
  s.tuples = TupleSet(2 * size, true);
  s.tuples_g1 = TupleSet::from_ids(2 * size, {});
  s.tuples_g2 = TupleSet::from_ids(2 * size, {});
  for (std::size_t i = 0; i < size; ++i) {
    s.tuples_g1.insert(i);
    s.tuples_g2.insert(size + i);
  }
  s.avg_g1 = g1;
  s.avg_g2 = g2;
  return s;
}

}  // namespace

TEST(MineFrequent, MatchesExhaustiveEnumeration) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto t = fixture::random_table(1000 + seed);
    const auto groups = random_groups(t.ds);
    for (double sigma : {0.02, 0.1, 0.3}) {
      const auto got = mined_strings(mine_frequent_subpopulations(t.ds, sigma, groups));
      EXPECT_EQ(got, oracle::frequent_patterns(t.rows, sigma)) << "seed " << seed << " sigma " << sigma;
    }
  }
}

TEST(MineFrequent, SurveyFullSupportIsEmpty) {
  const auto ds = parse_csv(fixture::kSurveyCsv, fixture::survey_schema());
  const auto groups = GroupContext::build(ds, Pattern::parse("Gender=Male"),
                                          Pattern::parse("Gender!=Male"));
  EXPECT_TRUE(mine_frequent_subpopulations(ds, 1.0, groups).empty());
  // Only immutable attributes are mined: YrsProfCoding never appears.
  for (const auto& s : mine_frequent_subpopulations(ds, 0.25, groups)) {
    EXPECT_FALSE(s.pattern.mentions("YrsProfCoding"));
    EXPECT_FALSE(s.pattern.mentions("TC"));
  }
}

TEST(MineFrequent, SerialAndParallelKernelsAgree) {
  const auto t = fixture::random_table(77);
  const auto groups = random_groups(t.ds);
  SubpopMinerOptions serial;
  serial.parallel = false;
  SubpopMinerOptions parallel;
  parallel.workers = 4;
  const auto a = mine_frequent_subpopulations(t.ds, 0.01, groups, serial);
  const auto b = mine_frequent_subpopulations(t.ds, 0.01, groups, parallel);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].pattern, b[i].pattern);
    EXPECT_EQ(a[i].tuples, b[i].tuples);
  }
}

TEST(MineFrequent, SubpopulationInvariants) {
  const auto t = fixture::random_table(5);
  const auto groups = random_groups(t.ds);
  const auto n = static_cast<double>(t.ds.size());
  for (const auto& s : mine_frequent_subpopulations(t.ds, 0.05, groups)) {
    EXPECT_EQ(s.tuples, evaluate_pattern(t.ds, s.pattern));
    EXPECT_EQ(s.tuples_g1, s.tuples & groups.g1);
    EXPECT_EQ(s.tuples_g2, s.tuples & groups.g2);
    EXPECT_DOUBLE_EQ(s.support,
                     static_cast<double>((s.tuples_g1 | s.tuples_g2).count()) / n);
    if (s.size_g1() > 0) EXPECT_DOUBLE_EQ(s.avg_g1, group_average(t.ds, s.tuples_g1));
    else EXPECT_TRUE(std::isnan(s.avg_g1));
    for (const auto& p : s.pattern.predicates()) EXPECT_EQ(p.op, Op::Equals);
  }
}

TEST(MineFrequent, PredicateCapAndSigmaRange) {
  const auto t = fixture::random_table(12);
  const auto groups = random_groups(t.ds);
  SubpopMinerOptions opts;
  opts.max_predicates = 1;
  for (const auto& s : mine_frequent_subpopulations(t.ds, 0.01, groups, opts)) {
    EXPECT_EQ(s.pattern.size(), 1u);
  }
  EXPECT_THROW(mine_frequent_subpopulations(t.ds, 0.0, groups), InputError);
  EXPECT_THROW(mine_frequent_subpopulations(t.ds, 1.5, groups), InputError);
}

TEST(ScenarioFilter, AnalystsAboveDevelopers) {
  // Global: analysts 106K vs developers 96K; keep where analysts earn more.
  std::vector<Subpopulation> subs{with_averages("a", 115000, 105000),
                                  with_averages("b", 90000, 99000),
                                  with_averages("c", 100000, 100000)};
  const auto kept = scenario_filter(subs, DirectionMode::G1Above, 106000, 96000, 10);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].pattern.to_string(), "S=a");
}

TEST(ScenarioFilter, ReverseOfGlobal) {
  // Global: 41.6% for g1 (males) below 46.9% for g2; keep reversals.
  std::vector<Subpopulation> subs{with_averages("up", 0.50, 0.40),
                                  with_averages("down", 0.30, 0.45)};
  const auto kept = scenario_filter(subs, DirectionMode::ReverseOfGlobal, 0.416, 0.469, 10);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].pattern.to_string(), "S=up");
  EXPECT_EQ(resolve_direction(DirectionMode::ReverseOfGlobal, kept[0]), DirectionMode::G1Above);
}

TEST(ScenarioFilter, EmptyAndSmallSlices) {
  EXPECT_TRUE(scenario_filter({}, DirectionMode::G1Above, 1, 0, 10).empty());
  std::vector<Subpopulation> subs{with_averages("tiny", 5, 1, 5)};
  EXPECT_TRUE(scenario_filter(subs, DirectionMode::G1Above, 1, 0, 10).empty());
  EXPECT_EQ(scenario_filter(subs, DirectionMode::G1Above, 1, 0, 5).size(), 1u);
}

TEST(DirectionMode, ParseRoundTrip) {
  for (auto m : {DirectionMode::G1Above, DirectionMode::G1Below, DirectionMode::ReverseOfGlobal}) {
    EXPECT_EQ(parse_direction_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_direction_mode("sideways"), InputError);
}
