// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kgcd/error.hpp"
#include "kgcd/fixtures.hpp"
#include "kgcd/grammar.hpp"
#include "kgcd/identifiers.hpp"
#include "kgcd/mask.hpp"
#include "oracles.hpp"

namespace kgcd {
namespace {

std::vector<TokenId> as_vector(const std::set<TokenId>& s) { return {s.begin(), s.end()}; }

class FigureOneMask : public ::testing::Test {
 protected:
  FigureOneMask() : idx_(oracle::build_index(figure1_fixture())), g_(*idx_) {}

  DecoderState feed(const std::string& text) const {
    DecoderState st = g_.initial_state();
    for (TokenId t : tokenize_query(text, idx_->vocab())) st = g_.advance(st, t);
    return st;
  }
  const Identifier& relation(const std::string& key) const {
    for (const auto& id : idx_->relation_identifiers()) {
      if (id.subject_key == key) return id;
    }
    throw std::runtime_error("no relation " + key);
  }

  std::shared_ptr<const ConstraintIndex> idx_;
  Grammar g_;
};

TEST_F(FigureOneMask, WriteIsExcludedAfterMichaelBay) {
  const auto& write = relation("write").token_seq;
  DecoderState st = feed("SELECT ?var0 WHERE { [ michael bay (director) ]");
  bool blocked = false;
  for (TokenId t : write) {
    if (!allowed_tokens(g_, st, {MaskMode::Full}).test(t)) {
      blocked = true;
      break;
    }
    st = g_.advance(st, t);
  }
  EXPECT_TRUE(blocked);

  // Without pruning the same path is open.
  st = feed("SELECT ?var0 WHERE { [ michael bay (director) ]");
  for (TokenId t : write) {
    ASSERT_TRUE(allowed_tokens(g_, st, {MaskMode::NoPruning}).test(t));
    st = g_.advance(st, t);
  }
  EXPECT_EQ(st.slot, SlotKind::PatternTail);
}

TEST_F(FigureOneMask, VariableHeadIsNotPruned) {
  const auto& v = idx_->vocab();
  DecoderState st = feed("ASK { ?var0");
  for (TokenId t : {v.id("["), v.id("w"), v.id("r")}) {
    EXPECT_EQ(allowed_tokens(g_, st, {MaskMode::Full}),
              allowed_tokens(g_, st, {MaskMode::NoPruning}));
    st = g_.advance(st, t);
  }
}

TEST(Mask, TailRestrictedToRelationTails) {
  const std::vector<Triple> triples = {{{"A"}, {"r1"}, {"B"}},
                                       {{"C"}, {"r1"}, {"D"}},
                                       {{"B"}, {"r2"}, {"E"}},
                                       {{"E"}, {"r2"}, {"A"}}};
  const std::vector<LabelRecord> labels = {{"A", "apple", {}, ""}, {"B", "berry", {}, ""},
                                           {"C", "cherry", {}, ""}, {"D", "date", {}, ""},
                                           {"E", "elder", {}, ""}};
  const auto idx = ConstraintIndex::build(KnowledgeGraph::build(triples), labels,
                                          Vocabulary::standard());
  const Grammar g(*idx);
  DecoderState st = g.initial_state();
  for (TokenId t : tokenize_query("ASK { [ apple ] [ r1 ]", idx->vocab())) {
    st = g.advance(st, t);
  }
  const auto& v = idx->vocab();
  st = g.advance(st, v.id("["));
  EXPECT_EQ(allowed_tokens(g, st, {MaskMode::Full}).to_vector(),
            (std::vector<TokenId>{v.id("b"), v.id("d")}));
  // With (head, relation) pairs only B remains.
  EXPECT_EQ(allowed_tokens(g, st, {MaskMode::Full, true}).to_vector(),
            std::vector<TokenId>{v.id("b")});
  EXPECT_EQ(allowed_tokens(g, st, {MaskMode::NoPruning}).count(), 5u);
}

TEST(Mask, RestrictTrieBySubjects) {
  const auto idx = oracle::build_index(figure1_fixture());
  const auto& trie = idx->entity_trie();
  const std::vector<TokenId> open = {idx->vocab().reserved().open_bracket};
  EXPECT_TRUE(restrict_trie_by_subjects(trie, open, {}).empty());
  std::vector<std::uint32_t> all(idx->graph().num_entities());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  EXPECT_EQ(restrict_trie_by_subjects(trie, open, all), trie.allowed_continuations(open));
  const std::uint32_t b = *idx->graph().find_entity("Pearl_Harbor");
  const std::vector<std::uint32_t> only = {b};
  EXPECT_EQ(restrict_trie_by_subjects(trie, open, only),
            std::vector<TokenId>{idx->entity_identifiers()[b].token_seq[1]});
}

TEST(Mask, ApplyMask) {
  const std::vector<double> zeros(6, 0.0);
  TokenMask m(6);
  m.set(0);
  const auto out = apply_mask(zeros, m);
  EXPECT_EQ(out[0], 0.0);
  for (int i = 1; i < 6; ++i) EXPECT_TRUE(std::isinf(out[i]) && out[i] < 0);

  const std::vector<double> logits = {-1, -2, -3, -4, -5, -6};
  EXPECT_EQ(apply_mask(logits, TokenMask::all(6)), logits);
  for (double x : apply_mask(logits, TokenMask(6))) EXPECT_EQ(x, -INFINITY);
  EXPECT_THROW(apply_mask(logits, TokenMask(5)), InvalidArgument);
}

TEST(Mask, PackedLayoutIsLsbFirst) {
  TokenMask m(20);
  m.set(0);
  m.set(9);
  m.set(19);
  EXPECT_EQ(m.pack(), (std::vector<std::uint8_t>{0x01, 0x02, 0x08}));
}

// Fixtures with at most 50 entities; labels over a small alphabet so tries
// share prefixes.
std::vector<Fixture> small_fixtures() {
  std::vector<Fixture> out = {figure1_fixture()};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    FixtureSpec spec;
    spec.entities = 10 * seed;
    spec.relations = 1 + seed;
    spec.density = 1.5;
    spec.label_alphabet = "ab";
    spec.label_length = 3;
    spec.questions = 3;
    spec.seed = seed;
    out.push_back(generate_fixture(spec));
  }
  return out;
}

TEST(MaskOracle, EqualsExhaustiveOracleOnRandomWalks) {
  std::mt19937_64 rng(31);
  std::size_t states = 0;
  for (const auto& fx : small_fixtures()) {
    const auto idx = oracle::build_index(fx);
    const auto ref = oracle::make_ref_graph(fx.triples, *idx);
    for (int max_patterns : {1, 2, 3}) {
      const Grammar g(*idx, GrammarConfig{max_patterns});
      for (MaskMode mode : {MaskMode::Full, MaskMode::NoPruning}) {
        for (bool strict : {false, true}) {
          const oracle::RefConfig cfg{mode, max_patterns, strict};
          for (int walk = 0; walk < 40; ++walk) {
            DecoderState st = g.initial_state();
            while (true) {
              const auto m = allowed_tokens(g, st, {mode, strict});
              const auto want = oracle::allowed(ref, idx->vocab(), st.emitted, cfg);
              ASSERT_EQ(m.to_vector(), as_vector(want))
                  << detokenize(st.emitted, idx->vocab());
              ++states;
              if (m.empty()) break;
              const auto opts = m.to_vector();
              st = g.advance(st, opts[rng() % opts.size()]);
            }
            ASSERT_EQ(st.slot, SlotKind::End);
          }
        }
      }
    }
  }
  EXPECT_GT(states, 10000u);
}

TEST(MaskOracle, ContainmentAcrossModes) {
  std::mt19937_64 rng(32);
  for (const auto& fx : small_fixtures()) {
    const auto idx = oracle::build_index(fx);
    const Grammar g(*idx);
    for (int walk = 0; walk < 50; ++walk) {
      DecoderState st = g.initial_state();
      while (st.slot != SlotKind::End) {
        const auto full = allowed_tokens(g, st, {MaskMode::Full});
        const auto strict = allowed_tokens(g, st, {MaskMode::Full, true});
        const auto nop = allowed_tokens(g, st, {MaskMode::NoPruning});
        const auto unc = allowed_tokens(g, st, {MaskMode::Unconstrained});
        ASSERT_TRUE(strict.subset_of(full));
        ASSERT_TRUE(full.subset_of(nop));
        ASSERT_TRUE(nop.subset_of(unc));
        const auto opts = (walk % 2 ? full : nop).to_vector();
        if (opts.empty()) break;
        st = g.advance(st, opts[rng() % opts.size()]);
      }
    }
  }
}

TEST(MaskOracle, UnconstrainedMatchesOracle) {
  std::mt19937_64 rng(33);
  const auto fx = figure1_fixture();
  const auto idx = oracle::build_index(fx);
  const auto ref = oracle::make_ref_graph(fx.triples, *idx);
  const Grammar g(*idx);
  const oracle::RefConfig cfg{MaskMode::Unconstrained, 4, false};
  const auto& v = idx->vocab();
  for (int walk = 0; walk < 200; ++walk) {
    DecoderState st = g.initial_state();
    for (int step = 0; step < 40; ++step) {
      const auto m = allowed_tokens(g, st, {MaskMode::Unconstrained});
      ASSERT_EQ(m.to_vector(), as_vector(oracle::allowed(ref, v, st.emitted, cfg)));
      if (m.empty()) break;
      // Mostly follow the template so that both branches are exercised.
      const auto legal = allowed_tokens(g, st, {MaskMode::NoPruning}).to_vector();
      TokenId t;
      if (!legal.empty() && rng() % 10 != 0) {
        t = legal[rng() % legal.size()];
      } else {
        const auto any = m.to_vector();
        t = any[rng() % any.size()];
      }
      st = g.advance_lenient(st, t);
    }
  }
}

// Exact iff every state's value is one more than its best child's.
TEST(MinCompletion, SatisfiesBellmanOnRandomWalks) {
  std::mt19937_64 rng(34);
  std::size_t states = 0;
  for (const auto& fx : small_fixtures()) {
    const auto idx = oracle::build_index(fx);
    for (int max_patterns : {1, 2}) {
      const Grammar g(*idx, GrammarConfig{max_patterns});
      for (MaskOptions mo : {MaskOptions{MaskMode::Full, false},
                             MaskOptions{MaskMode::Full, true},
                             MaskOptions{MaskMode::NoPruning, false},
                             MaskOptions{MaskMode::Unconstrained, false}}) {
        const bool lenient = mo.mode == MaskMode::Unconstrained;
        auto step = [&](const DecoderState& s, TokenId t) {
          return lenient ? g.advance_lenient(s, t) : g.advance(s, t);
        };
        for (int walk = 0; walk < 15; ++walk) {
          DecoderState st = g.initial_state();
          for (int n = 0; n < 60 && st.slot != SlotKind::End; ++n) {
            const auto opts = allowed_tokens(g, st, mo).to_vector();
            std::optional<std::size_t> best;
            for (TokenId t : opts) {
              const auto c = min_completion(g, step(st, t), mo);
              if (c && (!best || *c + 1 < *best)) best = *c + 1;
            }
            ASSERT_EQ(min_completion(g, st, mo), best) << detokenize(st.emitted, idx->vocab());
            ++states;
            if (opts.empty()) break;
            st = step(st, opts[rng() % opts.size()]);
          }
          if (st.slot == SlotKind::End) ASSERT_EQ(min_completion(g, st, mo), 0u);
        }
      }
    }
  }
  EXPECT_GT(states, 2000u);
}

TEST(MinCompletion, FigureOne) {
  const auto idx = oracle::build_index(figure1_fixture());
  const Grammar g(*idx);
  auto at = [&](const std::string& text, MaskMode mode) {
    DecoderState st = g.initial_state();
    for (TokenId t : tokenize_query(text, idx->vocab())) st = g.advance(st, t);
    return min_completion(g, st, {mode});
  };
  // "ASK {" "?var0" relation "?var1" "." "}" with the shortest relation.
  std::size_t shortest = SIZE_MAX;
  for (const auto& id : idx->relation_identifiers()) {
    shortest = std::min(shortest, id.token_seq.size());
  }
  EXPECT_EQ(at("", MaskMode::Full), 6 + shortest);
  EXPECT_EQ(at("ASK { ?var0 [ direct ] ?var1 .", MaskMode::Full), 1u);
  // Unbound projection needs another pattern.
  EXPECT_EQ(at("SELECT ?var0 WHERE { ?var1 [ direct ] ?var2 .", MaskMode::Full),
            4 + shortest);
  EXPECT_EQ(at("ASK { ?var0 [ direct ] ?var1 . }", MaskMode::Full), 0u);
}

TEST(MaskOracle, EmptyGraphOffersNoIdentifier) {
  const auto idx = ConstraintIndex::build(KnowledgeGraph::build({}), {},
                                          Vocabulary::standard());
  const Grammar g(*idx);
  DecoderState st = g.initial_state();
  for (TokenId t : tokenize_query("ASK {", idx->vocab())) st = g.advance(st, t);
  const auto m = allowed_tokens(g, st, {MaskMode::Full});
  EXPECT_FALSE(m.test(idx->vocab().reserved().open_bracket));
  EXPECT_TRUE(m.test(idx->vocab().reserved().variables[0]));
  st = g.advance(st, idx->vocab().reserved().variables[0]);
  // No relation can follow.
  EXPECT_TRUE(allowed_tokens(g, st, {MaskMode::Full}).empty());
}

}  // namespace
}  // namespace kgcd
