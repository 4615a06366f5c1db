#pragma once

#include <random>
#include <string>
#include <vector>

#include "dispex/explanation_miner.hpp"
#include "dispex/table.hpp"
#include "dispex/util.hpp"
#include "oracles.hpp"

namespace fixture {

// The four-row developer survey sample.
inline const char* kSurveyCsv =
    "Gender,Ethnicity,Education,Role,YrsProfCoding,TC\n"
    "Non-binary,White,BS,Business analyst,6-8,83000\n"
    "Male,South Asian,PhD,Data analyst,4-6,124000\n"
    "Female,South Asian,MS,Back-end developer,2-4,75000\n"
    "Male,East Asian,BS,Back-end developer,6-8,59000\n";

inline dispex::SchemaConfig survey_schema() {
  using K = dispex::AttributeKind;
  dispex::SchemaConfig s;
  s.kinds = {{"Gender", K::Immutable},    {"Ethnicity", K::Immutable},
             {"Education", K::Immutable}, {"Role", K::Immutable},
             {"YrsProfCoding", K::Mutable}, {"TC", K::Outcome}};
  return s;
}

// Years of professional coding depends on role, ethnicity and education.
inline const char* kSurveyDag =
    "Role -> YrsProfCoding\n"
    "Ethnicity -> YrsProfCoding\n"
    "Education -> YrsProfCoding\n"
    "YrsProfCoding -> TC\n";

struct RandomTable {
  dispex::Dataset ds;
  oracle::Rows rows;
};

// Up to 6 immutable attributes with domains of at most 5 values, at most
// 1000 rows, plus an auxiliary group column and a random outcome.
inline RandomTable random_table(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n_attrs = 1 + dispex::uniform_below(rng, 6);
  const std::size_t n_rows = 20 + dispex::uniform_below(rng, 981);
  oracle::Rows rows;
  std::vector<dispex::RawColumn> cols;
  std::vector<std::size_t> dom(n_attrs);
  for (std::size_t a = 0; a < n_attrs; ++a) {
    rows.attrs.push_back("A" + std::to_string(a));
    dom[a] = 1 + dispex::uniform_below(rng, 5);
    cols.push_back({rows.attrs.back(), dispex::AttributeKind::Immutable, {}});
  }
  cols.push_back({"G", dispex::AttributeKind::Auxiliary, {}});
  rows.cells.resize(n_rows);
  std::vector<std::optional<double>> outcome;
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t a = 0; a < n_attrs; ++a) {
      // Skewed draws so that some values are rare and some frequent.
      const auto u = dispex::uniform01(rng);
      const auto v = static_cast<std::size_t>(u * u * static_cast<double>(dom[a]));
      const std::string cell = "v" + std::to_string(v);
      rows.cells[r].push_back(cell);
      cols[a].cells.push_back(cell);
    }
    cols.back().cells.push_back(dispex::uniform_below(rng, 2) ? "a" : "b");
    outcome.push_back(1.0 + dispex::uniform01(rng));
  }
  auto ds = dispex::Dataset::build(std::move(cols), "Y", std::move(outcome), 10);
  return {std::move(ds), std::move(rows)};
}

// Candidate explanation over an explicit tuple set, for selector tests.
inline dispex::DisparityExplanation make_exp(const std::string& name, dispex::TupleSet tuples,
                                             double delta, const dispex::TupleSet& d_union) {
  dispex::DisparityExplanation e;
  e.subpopulation.pattern = dispex::Pattern::parse("S=" + name);
  e.subpopulation.support =
      static_cast<double>(tuples.intersect_count(d_union)) / static_cast<double>(tuples.universe());
  e.subpopulation.tuples = std::move(tuples);
  e.treatment = dispex::Pattern::parse("T=1");
  e.delta = delta;
  e.support = e.subpopulation.support;
  return e;
}

struct SelectionInstance {
  std::vector<dispex::DisparityExplanation> exps;
  dispex::TupleSet d_union;
};

// m candidates over a universe of n tuples. Each subpopulation is a random
// window of the universe, so overlaps range from none to near-total.
inline SelectionInstance random_selection_instance(std::mt19937_64& rng, std::size_t m,
                                                   std::size_t n = 200) {
  SelectionInstance inst{{}, dispex::TupleSet(n, true)};
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t len = n / 10 + dispex::uniform_below(rng, n / 2);
    const std::size_t start = dispex::uniform_below(rng, n - len + 1);
    dispex::TupleSet t(n);
    for (std::size_t j = start; j < start + len; ++j) t.insert(j);
    const double delta = 0.01 + dispex::uniform01(rng);
    inst.exps.push_back(make_exp("e" + std::to_string(i), std::move(t), delta, inst.d_union));
  }
  return inst;
}

}  // namespace fixture
