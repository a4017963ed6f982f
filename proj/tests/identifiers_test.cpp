// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "kgcd/error.hpp"
#include "kgcd/identifiers.hpp"
#include "kgcd/vocabulary.hpp"

namespace kgcd {
namespace {

const Vocabulary& V() {
  static const Vocabulary v = Vocabulary::standard();
  return v;
}

TEST(Vocabulary, ReservedTermsAreSingleTokens) {
  for (const char* t : {"?var0", "?var9", "SELECT", "ASK", "DISTINCT", "COUNT",
                        "WHERE", "{", "}", ".", "[", "]", "(", ")"}) {
    auto id = V().find(t);
    ASSERT_TRUE(id) << t;
    EXPECT_EQ(V().text(*id), t);
  }
}

TEST(Vocabulary, DenseRoundTrip) {
  for (TokenId i = 0; i < V().size(); ++i) EXPECT_EQ(V().id(V().text(i)), i);
  EXPECT_EQ(Vocabulary::ascii().size() + 128, V().size());
}

TEST(Vocabulary, RejectsMissingReserved) {
  EXPECT_THROW(Vocabulary(std::vector<std::string>{"a", "b"}), InvalidArgument);
}

TEST(Identifiers, PaperTableExamples) {
  const std::vector<std::string> director = {"film director"};
  EXPECT_EQ(make_identifier_surface("Quentin Tarantino", director, "m.0693l", {}),
            "[ quentin tarantino (film director) ]");
  const std::vector<std::string> human = {"human"};
  EXPECT_EQ(make_identifier_surface("Quentin Tarantino", human, "Q3772", {}),
            "[ quentin tarantino (human) ]");
}

TEST(Identifiers, CollisionAppendsIri) {
  EXPECT_EQ(make_identifier_surface("Foo", {}, "ex:E1", {"[ foo ]"}),
            "[ foo | ex:E1 ]");
  EXPECT_THROW(make_identifier_surface("Foo", {}, "ex:E1", {"[ foo ]", "[ foo | ex:E1 ]"}),
               InvalidArgument);
}

TEST(Identifiers, TwoSmallestTypes) {
  const std::vector<std::string> types = {"zeta", "Beta", "alpha", "beta"};
  EXPECT_EQ(make_identifier_surface("X", types, "", {}), "[ x (alpha, beta) ]");
}

TEST(Identifiers, BracketsAndSpacesNormalized) {
  EXPECT_EQ(make_identifier_surface("  A  [b]\tc ", {}, "", {}), "[ a (b) c ]");
  EXPECT_THROW(make_identifier_surface("   ", {}, "", {}), InvalidArgument);
}

TEST(Identifiers, MinimalTokenization) {
  const auto& r = V().reserved();
  EXPECT_EQ(tokenize_identifier("[ a ]", V()),
            (std::vector<TokenId>{r.open_bracket, *V().find("a"), r.close_bracket}));
}

TEST(Identifiers, RoundTrip) {
  const std::string s = "[ michael bay (film director) ]";
  const auto toks = tokenize_identifier(s, V());
  EXPECT_EQ(toks.front(), V().reserved().open_bracket);
  EXPECT_EQ(toks.back(), V().reserved().close_bracket);
  EXPECT_EQ(detokenize(toks, V()), s);
}

TEST(Identifiers, UnrepresentableByteIsNamed) {
  const auto ascii = Vocabulary::ascii();
  try {
    tokenize_identifier("[ caf\xc3\xa9 ]", ascii);
    FAIL();
  } catch (const TokenizeError& e) {
    EXPECT_NE(std::string(e.what()).find("0xc3"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(tokenize_identifier("[ caf\xc3\xa9 ]", V()));
}

TEST(Identifiers, QueryTokenizationKeepsKeywordsWhole) {
  const std::string q =
      "SELECT DISTINCT COUNT(?var0) WHERE { [ bob dylan ] [ award ] ?var0 . }";
  const auto toks = tokenize_query(q, V());
  EXPECT_EQ(toks[0], V().reserved().select);
  EXPECT_EQ(toks[1], V().reserved().distinct);
  EXPECT_EQ(toks[2], V().reserved().count);
  EXPECT_EQ(detokenize(toks, V()), q);
  EXPECT_THROW(tokenize_query("SELECT ?x WHERE", V()), TokenizeError);
  EXPECT_THROW(tokenize_query("FILTER", V()), TokenizeError);
}

// Independent rendering of the surface form for plain ASCII labels.
std::string expected_surface(const std::string& label, std::vector<std::string> types) {
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  for (auto& t : types) t = lower(t);
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  std::string body = lower(label);
  if (!types.empty()) {
    body += " (" + types[0];
    if (types.size() > 1) body += ", " + types[1];
    body += ")";
  }
  return body;
}

TEST(Identifiers, TenThousandLabelsWithCollisions) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> kinds = {"Person", "film", "award", "place"};
  std::vector<Triple> triples;
  std::vector<LabelRecord> labels;
  char key[16];
  for (int i = 0; i < 10000; ++i) {
    std::snprintf(key, sizeof key, "E%05d", i);
    const std::string k(key);
    std::string label;
    const int len = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < len; ++j) label += "aAbB"[rng() % 4];
    std::vector<std::string> types;
    for (const auto& t : kinds) {
      if (rng() % 3 == 0) types.push_back(t);
    }
    labels.push_back({k, label, types, "ex:" + k});
    if (i > 0) triples.push_back({{labels[i - 1].key}, {"next"}, {k}});
  }
  const auto g = KnowledgeGraph::build(triples);
  const auto table = build_identifier_table(g, labels, V());
  ASSERT_EQ(table.entities.size(), 10000u);

  std::set<std::string> taken;
  std::size_t collisions = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& id = table.entities[i];
    ASSERT_EQ(id.subject_key, labels[i].key);
    const std::string body = expected_surface(labels[i].label, labels[i].types);
    std::string want = "[ " + body + " ]";
    if (taken.count(want)) {
      want = "[ " + body + " | " + labels[i].iri + " ]";
      ++collisions;
    }
    taken.insert(want);
    EXPECT_EQ(id.surface, want);
    EXPECT_EQ(detokenize(id.token_seq, V()), id.surface);
    EXPECT_EQ(tokenize_identifier(id.surface, V()), id.token_seq);
  }
  EXPECT_EQ(taken.size(), 10000u);
  EXPECT_GT(collisions, 5000u);
}

TEST(Identifiers, SharedIriIsAnError) {
  std::vector<Triple> triples = {{{"A"}, {"r"}, {"B"}}};
  std::vector<LabelRecord> labels = {{"A", "x", {}, "same"}, {"B", "x", {}, "same"}};
  const auto g = KnowledgeGraph::build(triples);
  EXPECT_NO_THROW(build_identifier_table(g, {labels.data(), 1}, V()));
  // B falls back to "[ x | same ]"; a third "x" with the same IRI cannot.
  triples.push_back({{"C"}, {"r"}, {"B"}});
  labels.push_back({"C", "x", {}, "same"});
  EXPECT_THROW(build_identifier_table(KnowledgeGraph::build(triples), labels, V()),
               InvalidArgument);
}

TEST(Identifiers, UnlabelledKeysUseKey) {
  const std::vector<Triple> triples = {{{"Michael_Bay"}, {"direct"}, {"Pearl_Harbor"}}};
  const auto table = build_identifier_table(KnowledgeGraph::build(triples), {}, V());
  EXPECT_EQ(table.entities[0].surface, "[ michael bay ]");
  EXPECT_EQ(table.relations[0].surface, "[ direct ]");
}

TEST(Identifiers, LabelForMissingKeyIsNamed) {
  const std::vector<Triple> triples = {{{"A"}, {"r"}, {"B"}}};
  const std::vector<LabelRecord> labels = {{"Ghost", "g", {}, ""}};
  try {
    build_identifier_table(KnowledgeGraph::build(triples), labels, V());
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("Ghost"), std::string::npos);
  }
}

TEST(Identifiers, Deterministic) {
  const std::vector<std::string> types = {"b", "a"};
  const auto a = make_identifier("k", "Label", types, "iri", {}, V());
  const auto b = make_identifier("k", "Label", types, "iri", {}, V());
  EXPECT_EQ(a, b);
}

TEST(Identifiers, LabelsFileRoundTrip) {
  const std::vector<LabelRecord> labels = {{"A", "Alpha one", {"x", "y"}, "ex:A"},
                                           {"B", "Beta", {}, ""}};
  const auto dir = std::filesystem::temp_directory_path() / "kgcd_labels_test.tsv";
  write_labels_file(dir, labels);
  auto want = labels;
  want[1].iri = "B";  // defaults to the key
  EXPECT_EQ(read_labels_file(dir), want);
  std::filesystem::remove(dir);
  EXPECT_THROW(parse_labels("A\n", "l.tsv"), FormatError);
}

}  // namespace
}  // namespace kgcd
