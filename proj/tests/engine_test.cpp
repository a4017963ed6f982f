// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "kgcd/engine.hpp"
#include "kgcd/error.hpp"
#include "kgcd/fixtures.hpp"
#include "oracles.hpp"

namespace kgcd {
namespace {

TEST(Engine, SwapReplacesSnapshot) {
  const auto fx = figure1_fixture();
  const auto a = oracle::build_index(fx);
  Engine e(a);
  EXPECT_EQ(e.snapshot(), a);
  const auto held = e.snapshot();
  e.swap_graph(KnowledgeGraph::build({}), {});
  EXPECT_EQ(e.snapshot()->graph().num_entities(), 0u);
  // Old snapshots stay valid.
  EXPECT_EQ(held->graph().num_entities(), 5u);
  e.swap_graph(a);
  e.swap_graph(a);
  EXPECT_EQ(e.snapshot(), a);
}

TEST(Engine, DecodeAfterSwapSeesNewGraph) {
  auto fx = figure1_fixture();
  Engine e(oracle::build_index(fx));
  const auto scorer = make_uniform_scorer(e.snapshot()->vocab().size());
  DecodeOptions opts;
  opts.beam_size = 3;
  const auto before = e.decode("q", *scorer, opts);
  e.swap_graph(KnowledgeGraph::build({}), {});
  EXPECT_TRUE(e.decode("q", *scorer, opts).ranked.empty());
  e.swap_graph(KnowledgeGraph::build(fx.triples), fx.labels);
  EXPECT_EQ(e.decode("q", *scorer, opts), before);
}

TEST(Engine, VocabularyMismatchRejected) {
  const auto fx = figure1_fixture();
  Engine e(oracle::build_index(fx));
  const auto other = ConstraintIndex::build(KnowledgeGraph::build(fx.triples), fx.labels,
                                            Vocabulary::ascii());
  EXPECT_THROW(e.swap_graph(other), InvalidArgument);
  EXPECT_THROW(Engine(nullptr), InvalidArgument);
}

TEST(Engine, UnspellableGraphLeavesEngineUnchanged) {
  const auto fx = figure1_fixture();
  const auto ascii = ConstraintIndex::build(KnowledgeGraph::build(fx.triples), fx.labels,
                                            Vocabulary::ascii());
  Engine e(ascii);
  const std::vector<Triple> triples = {{{"Caf\xc3\xa9"}, {"r"}, {"B"}}};
  EXPECT_THROW(e.swap_graph(KnowledgeGraph::build(triples), {}), TokenizeError);
  EXPECT_EQ(e.snapshot(), ascii);
}

TEST(Engine, ConcurrentSwapsAndDecodes) {
  const auto fx = figure1_fixture();
  const auto a = oracle::build_index(fx);
  auto fx2 = fx;
  fx2.triples.push_back({{"Michael_Bay"}, {"write"}, {"Pearl_Harbor"}});
  const auto b = oracle::build_index(fx2);
  Engine e(a);
  const auto scorer = make_uniform_scorer(a->vocab().size());
  DecodeOptions opts;
  opts.beam_size = 4;
  const auto ra = decode(*a, "q", *scorer, opts);
  const auto rb = decode(*b, "q", *scorer, opts);
  std::atomic<bool> stop{false};
  std::thread swapper([&] {
    for (int i = 0; !stop; ++i) e.swap_graph(i % 2 ? a : b);
  });
  for (int i = 0; i < 40; ++i) {
    const auto r = e.decode("q", *scorer, opts);
    EXPECT_TRUE(r == ra || r == rb);
  }
  stop = true;
  swapper.join();
}

}  // namespace
}  // namespace kgcd
