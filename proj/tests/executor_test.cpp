// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kgcd/error.hpp"
#include "kgcd/executor.hpp"
#include "kgcd/fixtures.hpp"
#include "kgcd/identifiers.hpp"
#include "kgcd/mask.hpp"
#include "oracles.hpp"

namespace kgcd {
namespace {

TEST(Parse, SelectWithDistinct) {
  const auto ast = parse_query("SELECT DISTINCT ?var0 WHERE { [ a b ] [ r ] ?var0 . }");
  EXPECT_EQ(ast.form, QueryForm::Select);
  EXPECT_TRUE(ast.distinct);
  EXPECT_FALSE(ast.count);
  EXPECT_EQ(ast.projection, "var0");
  ASSERT_EQ(ast.patterns.size(), 1u);
  EXPECT_EQ(ast.patterns[0].head, (Term{Term::Kind::Identifier, "[ a b ]"}));
  EXPECT_EQ(ast.patterns[0].relation, (Term{Term::Kind::Identifier, "[ r ]"}));
  EXPECT_EQ(ast.patterns[0].tail, (Term{Term::Kind::Variable, "var0"}));
}

TEST(Parse, CountAndAsk) {
  const auto c = parse_query("SELECT COUNT(?var0) WHERE { <A> <r> ?var0 }");
  EXPECT_TRUE(c.count);
  EXPECT_EQ(c.patterns[0].head, (Term{Term::Kind::Iri, "A"}));
  const auto a = parse_query("ASK { ?var0 [ r ] ?var1 . ?var1 [ s ] [ x ] . }");
  EXPECT_EQ(a.form, QueryForm::Ask);
  EXPECT_EQ(a.patterns.size(), 2u);
}

TEST(Parse, ErrorsCarryOffsets) {
  try {
    parse_query("ASK { }");
    FAIL();
  } catch (const QueryParseError& e) {
    EXPECT_EQ(e.position(), 6u);
  }
  try {
    parse_query("ASK { ?a ?b }");
    FAIL();
  } catch (const QueryParseError& e) {
    EXPECT_EQ(e.position(), 12u);
  }
  EXPECT_THROW(parse_query("SELECT ?x WHERE { ?y [ r ] ?z }"), QueryParseError);
  EXPECT_THROW(parse_query("ASK { [ a ] [ r ] [ b ] } extra"), QueryParseError);
  EXPECT_THROW(parse_query("DESCRIBE ?x"), QueryParseError);
  EXPECT_THROW(parse_query("ASK { [ ] [ r ] ?x }"), QueryParseError);
}

TEST(Parse, TokenOverload) {
  const auto v = Vocabulary::standard();
  const std::string q = "SELECT COUNT(?var0) WHERE { [ a ] [ r ] ?var0 . }";
  EXPECT_EQ(parse_query(tokenize_query(q, v), v), parse_query(q));
}

class FigureOneExec : public ::testing::Test {
 protected:
  FigureOneExec() : idx_(oracle::build_index(figure1_fixture())) {}
  ResultSet run(const std::string& q) const { return execute(parse_query(q), *idx_); }
  std::shared_ptr<const ConstraintIndex> idx_;
};

TEST_F(FigureOneExec, Basics) {
  EXPECT_EQ(run("SELECT ?var0 WHERE { [ michael bay (director) ] [ direct ] ?var0 . }").values,
            (std::vector<std::string>{"Pearl_Harbor", "Transformers"}));
  // The write edge leaves only Ehren Kruger.
  EXPECT_TRUE(run("SELECT ?var0 WHERE { [ michael bay (director) ] [ write ] ?var0 . }").empty());
  EXPECT_EQ(run("SELECT COUNT(?var0) WHERE { [ michael bay (director) ] [ direct ] ?var0 . }")
                .count,
            2u);
  const auto ask = run("ASK { [ michael bay (director) ] [ direct ] [ transformers (film) ] . }");
  EXPECT_EQ(ask.kind, ResultSet::Kind::Boolean);
  EXPECT_TRUE(ask.boolean);
  EXPECT_FALSE(ask.empty());
  const auto no = run("ASK { [ transformers (film) ] [ direct ] [ michael bay (director) ] . }");
  EXPECT_FALSE(no.boolean);
  EXPECT_FALSE(no.empty());
  EXPECT_EQ(no.answers(), std::vector<std::string>{"false"});
  EXPECT_TRUE(run("ASK { [ nobody ] [ direct ] ?var0 . }").answers() ==
              std::vector<std::string>{"false"});
}

TEST_F(FigureOneExec, BagSemanticsAndDistinct) {
  // Both films lead to the same award.
  const std::string body =
      "WHERE { [ michael bay (director) ] [ direct ] ?var1 . ?var1 [ nominated for ] ?var0 . }";
  EXPECT_EQ(run("SELECT ?var0 " + body).values,
            (std::vector<std::string>{"Academy_Awards", "Academy_Awards"}));
  EXPECT_EQ(run("SELECT DISTINCT ?var0 " + body).values,
            std::vector<std::string>{"Academy_Awards"});
  EXPECT_EQ(run("SELECT COUNT(?var0) " + body).answers(), std::vector<std::string>{"1"});
}

TEST_F(FigureOneExec, IrisResolve) {
  EXPECT_EQ(run("SELECT ?var0 WHERE { <Michael_Bay> <direct> ?var0 }").values.size(), 2u);
  EXPECT_EQ(expand_iris("SELECT ?var0 WHERE { [ michael bay (director) ] [ direct ] ?var0 . }",
                        *idx_),
            "SELECT ?var0 WHERE { <Michael_Bay> <direct> ?var0 . }");
  EXPECT_EQ(expand_iris("ASK { [ nobody ] [ direct ] ?var0 . }", *idx_),
            "ASK { [ nobody ] <direct> ?var0 . }");
}

TEST_F(FigureOneExec, CheckQuery) {
  EXPECT_TRUE(check_query("SELECT ?var0 WHERE { [ michael bay (director) ] [ direct ] ?var0 . }",
                          *idx_)
                  .executable());
  const auto write =
      check_query("SELECT ?var0 WHERE { [ michael bay (director) ] [ write ] ?var0 . }", *idx_);
  EXPECT_TRUE(write.parsed);
  EXPECT_TRUE(write.resolved);
  EXPECT_FALSE(write.connected);
  const auto unknown = check_query("ASK { [ nobody ] [ direct ] ?var0 . }", *idx_);
  EXPECT_TRUE(unknown.parsed);
  EXPECT_FALSE(unknown.resolved);
  const auto bad = check_query("ASK {", *idx_);
  EXPECT_FALSE(bad.parsed);
  EXPECT_FALSE(bad.error.empty());
}

TEST_F(FigureOneExec, AnswerSkipsEmptyAndBroken) {
  const std::vector<RankedQuery> ranked = {
      {{}, "ASK {", -1.0},
      {{}, "SELECT ?var0 WHERE { [ michael bay (director) ] [ write ] ?var0 . }", -2.0},
      {{}, "SELECT ?var0 WHERE { [ michael bay (director) ] [ direct ] ?var0 . }", -3.0},
      {{}, "ASK { [ michael bay (director) ] [ direct ] [ transformers (film) ] . }", -4.0}};
  const auto a = answer(ranked, *idx_);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->rank, 3u);
  EXPECT_EQ(a->query, ranked[2].text);
  EXPECT_EQ(a->result.values.size(), 2u);
  EXPECT_FALSE(answer(std::span(ranked).first(2), *idx_));
  EXPECT_FALSE(answer({}, *idx_));
  // An ASK that is false is still an answer.
  const std::vector<RankedQuery> ask = {
      {{}, "ASK { [ transformers (film) ] [ direct ] [ pearl harbor (film) ] . }", -1.0}};
  ASSERT_TRUE(answer(ask, *idx_));
  EXPECT_EQ(answer(ask, *idx_)->result.answers(), std::vector<std::string>{"false"});
}

// Grammar-generated queries on small graphs, executed by the engine and by
// exhaustive assignment.
TEST(ExecutorOracle, MatchesExhaustiveAssignment) {
  std::mt19937_64 rng(41);
  std::size_t compared = 0;
  std::size_t nonempty = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    FixtureSpec spec;
    spec.entities = 6 + 7 * seed;
    spec.relations = 2 + seed % 3;
    spec.density = 2.5;
    spec.label_alphabet = "ab";
    spec.label_length = 3;
    spec.questions = 2;
    spec.seed = seed;
    const auto fx = generate_fixture(spec);
    const auto idx = oracle::build_index(fx);
    const auto ref = oracle::make_ref_graph(fx.triples, *idx);
    for (int max_patterns : {1, 2, 3}) {
      const Grammar g(*idx, GrammarConfig{max_patterns});
      for (int walk = 0; walk < 120; ++walk) {
        DecoderState st = g.initial_state();
        const MaskMode mode = walk % 3 == 0 ? MaskMode::NoPruning : MaskMode::Full;
        while (st.slot != SlotKind::End) {
          const auto opts = allowed_tokens(g, st, {mode}).to_vector();
          if (opts.empty()) break;
          st = g.advance(st, opts[rng() % opts.size()]);
        }
        if (st.slot != SlotKind::End) continue;
        const auto ast = parse_query(st.emitted, idx->vocab());
        std::size_t vars = 0;
        for (int k = 0; k < 10; ++k) vars += (st.open_variables >> k) & 1;
        if (std::pow(static_cast<double>(ref.entities.size()), vars) > 2e5) continue;
        const auto got = execute(ast, *idx);
        ASSERT_EQ(got, oracle::execute(ast, ref)) << detokenize(st.emitted, idx->vocab());
        ++compared;
        nonempty += !got.empty();
      }
    }
  }
  EXPECT_GT(compared, 1000u);
  EXPECT_GT(nonempty, 100u);
}

TEST(ExecutorOracle, GoldQueriesReproduceAnswers) {
  FixtureSpec spec;
  spec.entities = 40;
  spec.mix = {1, 1, 1, 1};
  spec.questions = 60;
  spec.seed = 3;
  const auto fx = generate_fixture(spec);
  const auto idx = oracle::build_index(fx);
  const auto ref = oracle::make_ref_graph(fx.triples, *idx);
  for (const auto& item : fx.dataset) {
    const auto ast = parse_query(item.gold_query);
    EXPECT_EQ(execute(ast, *idx).answers(), item.answers) << item.gold_query;
    EXPECT_EQ(oracle::execute(ast, ref).answers(), item.answers) << item.gold_query;
  }
}

TEST(ExecutorOracle, DetokenizeParseRoundTrip) {
  std::mt19937_64 rng(43);
  const auto idx = oracle::build_index(figure1_fixture());
  const Grammar g(*idx);
  for (int walk = 0; walk < 500; ++walk) {
    DecoderState st = g.initial_state();
    while (st.slot != SlotKind::End) {
      const auto opts = allowed_tokens(g, st, {MaskMode::NoPruning}).to_vector();
      st = g.advance(st, opts[rng() % opts.size()]);
    }
    const std::string text = detokenize(st.emitted, idx->vocab());
    EXPECT_EQ(parse_query(text), parse_query(st.emitted, idx->vocab()));
    EXPECT_EQ(parse_query(expand_iris(text, *idx)).patterns.size(),
              parse_query(text).patterns.size());
  }
}

}  // namespace
}  // namespace kgcd
