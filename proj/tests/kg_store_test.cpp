// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "kgcd/error.hpp"
#include "kgcd/fixtures.hpp"
#include "kgcd/kg_store.hpp"

namespace kgcd {
namespace {

Triple T(const std::string& h, const std::string& r, const std::string& t) {
  return Triple{{h}, {r}, {t}};
}

TEST(KgStore, EmptyGraph) {
  const auto g = KnowledgeGraph::build({});
  EXPECT_EQ(g.num_entities(), 0u);
  EXPECT_EQ(g.num_relations(), 0u);
  EXPECT_EQ(g.num_triples(), 0u);
  EXPECT_TRUE(g.outgoing_relations({"A"}).empty());
  EXPECT_TRUE(g.tail_entities({"r"}).empty());
}

TEST(KgStore, SingleTripleIndices) {
  const std::vector<Triple> ts = {T("Michael_Bay", "direct", "Transformers")};
  const auto g = KnowledgeGraph::build(ts);
  EXPECT_EQ(g.outgoing_relations({"Michael_Bay"}),
            std::vector<RelationId>{{"direct"}});
  EXPECT_EQ(g.tail_entities({"direct"}), std::vector<EntityId>{{"Transformers"}});
}

TEST(KgStore, OutgoingAndTails) {
  const std::vector<Triple> ts = {T("A", "r1", "B"), T("A", "r2", "C"),
                                  T("C", "r1", "D")};
  const auto g = KnowledgeGraph::build(ts);
  EXPECT_EQ(g.outgoing_relations({"A"}),
            (std::vector<RelationId>{{"r1"}, {"r2"}}));
  EXPECT_EQ(g.tail_entities({"r1"}), (std::vector<EntityId>{{"B"}, {"D"}}));
  EXPECT_TRUE(g.outgoing_relations({"nobody"}).empty());
  EXPECT_TRUE(g.tail_entities({"nothing"}).empty());
  EXPECT_TRUE(g.contains_triple({"A"}, {"r1"}, {"B"}));
  EXPECT_FALSE(g.contains_triple({"B"}, {"r1"}, {"A"}));
}

TEST(KgStore, FigureOneHasNoWriteFromMichaelBay) {
  const auto fx = figure1_fixture();
  const auto g = KnowledgeGraph::build(fx.triples);
  const auto out = g.outgoing_relations({"Michael_Bay"});
  EXPECT_EQ(std::count(out.begin(), out.end(), RelationId{"write"}), 0);
  for (const auto& e : g.entity_keys()) {
    EXPECT_FALSE(g.contains_triple({"Michael_Bay"}, {"write"}, {e}));
  }
}

TEST(KgStore, DuplicatesAreMerged) {
  const std::vector<Triple> ts = {T("A", "r", "B"), T("A", "r", "B")};
  EXPECT_EQ(KnowledgeGraph::build(ts).num_triples(), 1u);
}

TEST(KgStore, EmptyComponentRejected) {
  const std::vector<Triple> ts = {T("A", "", "B")};
  EXPECT_THROW(KnowledgeGraph::build(ts), InvalidArgument);
}

TEST(KgStore, IndicesMatchBruteForceScan) {
  std::mt19937_64 rng(7);
  std::vector<Triple> ts;
  for (int i = 0; i < 10000; ++i) {
    ts.push_back(T("e" + std::to_string(rng() % 400), "r" + std::to_string(rng() % 12),
                   "e" + std::to_string(rng() % 400)));
  }
  const auto g = KnowledgeGraph::build(ts);
  const std::set<Triple> uniq(ts.begin(), ts.end());
  EXPECT_EQ(g.num_triples(), uniq.size());

  std::map<std::string, std::set<std::string>> out, tails;
  for (const auto& t : uniq) {
    out[t.head.value].insert(t.relation.value);
    tails[t.relation.value].insert(t.tail.value);
  }
  for (const auto& e : g.entity_keys()) {
    std::vector<RelationId> want;
    for (const auto& r : out[e]) want.push_back({r});
    EXPECT_EQ(g.outgoing_relations({e}), want) << e;
  }
  for (const auto& r : g.relation_keys()) {
    std::vector<EntityId> want;
    for (const auto& e : tails[r]) want.push_back({e});
    EXPECT_EQ(g.tail_entities({r}), want) << r;
  }
  for (int i = 0; i < 2000; ++i) {
    const auto t = T("e" + std::to_string(rng() % 400), "r" + std::to_string(rng() % 12),
                     "e" + std::to_string(rng() % 400));
    EXPECT_EQ(g.contains_triple(t.head, t.relation, t.tail), uniq.count(t) == 1);
  }
}

TEST(KgStore, OrderInsensitive) {
  std::mt19937_64 rng(3);
  std::vector<Triple> ts;
  for (int i = 0; i < 500; ++i) {
    ts.push_back(T("e" + std::to_string(rng() % 50), "r" + std::to_string(rng() % 5),
                   "e" + std::to_string(rng() % 50)));
  }
  const auto a = KnowledgeGraph::build(ts);
  std::shuffle(ts.begin(), ts.end(), rng);
  EXPECT_EQ(a, KnowledgeGraph::build(ts));
}

TEST(KgStore, ParseTriples) {
  const auto ts = parse_triples("# comment\nA\tr\tB\n\nC\tr\tD\n");
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(ts[1], T("C", "r", "D"));
}

TEST(KgStore, MalformedLineNamesLine) {
  try {
    parse_triples("A\tr\tB\nbroken line\n", "t.tsv");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("t.tsv:2"), std::string::npos);
  }
  EXPECT_THROW(parse_triples("A\tr\tB\tX\n"), FormatError);
  EXPECT_THROW(parse_triples("A\t\tB\n"), FormatError);
}

}  // namespace
}  // namespace kgcd
