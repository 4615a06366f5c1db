#include <gtest/gtest.h>

#include "dispex/causal_graph.hpp"
#include "dispex/errors.hpp"
#include "fixtures.hpp"

using namespace dispex;

using Names = std::set<std::string>;

TEST(ParseDag, SurveyChain) {
  const auto g = parse_dag("Role -> YrsProfCoding\nYrsProfCoding -> TC\n");
  EXPECT_EQ(g.nodes(), (Names{"Role", "TC", "YrsProfCoding"}));
  EXPECT_EQ(g.edges().size(), 2u);
  EXPECT_EQ(g.parents("TC"), (Names{"YrsProfCoding"}));
}

TEST(ParseDag, CommentsBlankLinesAndIsolatedNodes) {
  const auto g = parse_dag("# header\n\nA -> B  # trailing\n  C\n");
  EXPECT_EQ(g.nodes(), (Names{"A", "B", "C"}));
  EXPECT_TRUE(g.parents("C").empty());
}

TEST(ParseDag, RejectsCyclesAndSelfLoops) {
  EXPECT_THROW(parse_dag("A -> B\nB -> A\n"), DagError);
  EXPECT_THROW(parse_dag("A -> B\nB -> C\nC -> A\n"), DagError);
  EXPECT_THROW(parse_dag("A -> A\n"), DagError);
  EXPECT_THROW(parse_dag("A -> \n"), DagError);
}

TEST(ParseDag, EmptyTextIsEmptyDag) {
  const auto g = parse_dag("");
  EXPECT_TRUE(g.nodes().empty());
  const auto spliced = insert_treatment_node(parse_dag("X"), Pattern::parse("X=1"));
  EXPECT_TRUE(backdoor_adjustment_set(spliced, treatment_node_name(Pattern::parse("X=1")), "Y")
                  .confounders.empty());
}

TEST(InsertTreatmentNode, SurveySingleAttribute) {
  const auto g = parse_dag(fixture::kSurveyDag);
  const auto t = Pattern::parse("YrsProfCoding=6-8");
  const auto spliced = insert_treatment_node(g, t);
  const auto name = treatment_node_name(t);
  EXPECT_EQ(spliced.parents(name), (Names{"Education", "Ethnicity", "Role"}));
  EXPECT_EQ(spliced.children(name), (Names{"TC"}));
  EXPECT_TRUE(spliced.has_node("YrsProfCoding"));
}

TEST(InsertTreatmentNode, IsolatedNode) {
  const auto g = parse_dag("A -> Y\nM\n");
  const auto t = Pattern::parse("M=1");
  const auto spliced = insert_treatment_node(g, t);
  EXPECT_TRUE(spliced.parents(treatment_node_name(t)).empty());
  EXPECT_TRUE(spliced.children(treatment_node_name(t)).empty());
}

TEST(InsertTreatmentNode, TwoAttributesUnionMinusConstituents) {
  // Hand-built: P1 -> M1, P2 -> M2, M1 -> M2, M1 -> Y, M2 -> Y, P1 -> Y.
  const auto g = parse_dag("P1 -> M1\nP2 -> M2\nM1 -> M2\nM1 -> Y\nM2 -> Y\nP1 -> Y\n");
  const auto t = Pattern::parse("M1=a & M2=b");
  const auto spliced = insert_treatment_node(g, t);
  const auto name = treatment_node_name(t);
  EXPECT_EQ(spliced.parents(name), (Names{"P1", "P2"}));
  EXPECT_EQ(spliced.children(name), (Names{"Y"}));
  const auto adj = backdoor_adjustment_set(spliced, name, "Y");
  EXPECT_EQ(adj.confounders, (std::vector<std::string>{"P1", "P2"}));
}

TEST(InsertTreatmentNode, UnknownAttributeFails) {
  EXPECT_THROW(insert_treatment_node(parse_dag("A -> B"), Pattern::parse("Z=1")), std::exception);
}

TEST(BackdoorAdjustment, SurveyExample) {
  const auto g = parse_dag(fixture::kSurveyDag);
  const auto t = Pattern::parse("YrsProfCoding=6-8");
  const auto adj = backdoor_adjustment_set(insert_treatment_node(g, t), treatment_node_name(t), "TC");
  EXPECT_EQ(adj.confounders, (std::vector<std::string>{"Education", "Ethnicity", "Role"}));
}

TEST(BackdoorAdjustment, DefaultTwoLayerDagAdjustsForAllImmutables) {
  // Immutables I1..I3 point at every mutable and at the outcome.
  std::string text;
  for (const char* i : {"I1", "I2", "I3"}) {
    for (const char* m : {"M1", "M2"}) text += std::string(i) + " -> " + m + "\n";
    text += std::string(i) + " -> O\n";
  }
  text += "M1 -> O\nM2 -> O\n";
  const auto g = parse_dag(text);
  for (const char* m : {"M1=x", "M2=y", "M1=x & M2=y"}) {
    const auto t = Pattern::parse(m);
    const auto adj = backdoor_adjustment_set(insert_treatment_node(g, t), treatment_node_name(t), "O");
    EXPECT_EQ(adj.confounders, (std::vector<std::string>{"I1", "I2", "I3"})) << m;
  }
}

TEST(DagFingerprint, CanonicalAndSensitive) {
  const auto a = parse_dag("A -> B\nB -> C\nA -> C\n");
  const auto b = parse_dag("A -> C\n# reordered\nB -> C\nA -> B\n");
  const auto reversed = parse_dag("B -> A\nB -> C\nA -> C\n");
  EXPECT_EQ(dag_fingerprint(a), dag_fingerprint(parse_dag(a.serialize())));
  EXPECT_EQ(dag_fingerprint(a), dag_fingerprint(b));
  EXPECT_NE(dag_fingerprint(a), dag_fingerprint(reversed));
  EXPECT_EQ(parse_dag(a.serialize()), a);
}
