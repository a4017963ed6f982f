// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors
//
// Reference implementations used as test oracles. They work on raw triples
// and plain token sequences and share no code with the engine beyond the
// vocabulary and the identifier tables (the data under test).

#pragma once

#include <array>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "kgcd/constraint_index.hpp"
#include "kgcd/executor.hpp"
#include "kgcd/fixtures.hpp"
#include "kgcd/mask.hpp"
#include "kgcd/scorer.hpp"

namespace kgcd::oracle {

using RawTriple = std::tuple<std::string, std::string, std::string>;

struct RefGraph {
  std::set<RawTriple> triples;
  std::vector<std::string> entities;   // sorted keys
  std::vector<std::string> relations;  // sorted keys
  std::map<std::string, std::vector<TokenId>> entity_seq;
  std::map<std::string, std::vector<TokenId>> relation_seq;
  std::map<std::vector<TokenId>, std::string> entity_by_seq;
  std::map<std::vector<TokenId>, std::string> relation_by_seq;
  std::map<std::string, std::string> entity_by_surface;
  std::map<std::string, std::string> relation_by_surface;
};

RefGraph make_ref_graph(std::span<const Triple> triples,
                        const ConstraintIndex& index);

struct RefConfig {
  MaskMode mode = MaskMode::Full;
  int max_patterns = 4;
  bool strict_pairs = false;
};

/// Next tokens allowed after `prefix`, by rescanning the sequence.
std::set<TokenId> allowed(const RefGraph& g, const Vocabulary& v,
                          std::span<const TokenId> prefix, const RefConfig& c);

/// True when `prefix` is a finished query.
bool finished(const RefGraph& g, const Vocabulary& v,
              std::span<const TokenId> prefix, const RefConfig& c);

struct Enumerated {
  std::vector<TokenId> tokens;
  double logp = 0.0;
};

struct Enumeration {
  std::vector<Enumerated> accepted;  // ranked: logp desc, tokens asc
  std::size_t max_frontier = 0;      // widest set of live prefixes at one length
  std::size_t states = 0;            // prefixes visited
  bool truncated = false;
};

/// Every accepted sequence of at most `max_len` tokens, scored by summing the
/// scorer's step outputs. Stops (truncated = true) after `limit` prefixes.
Enumeration enumerate(const RefGraph& g, const Vocabulary& v,
                      const RefConfig& c, const Scorer& scorer,
                      const std::string& question, int max_len,
                      std::size_t limit = 2'000'000);

/// Exhaustive-assignment evaluation of a parsed query. Variables range over
/// all entities; a query with a variable in relation position is rejected.
ResultSet execute(const QueryAst& ast, const RefGraph& g);

/// Connectivity of every concrete pattern, checked by scanning the triples:
/// r leaves h when h is concrete, t is a tail of r when t is concrete.
bool connected(const QueryAst& ast, const RefGraph& g);

/// Recursive-descent check of the query template on detokenized text.
bool matches_template(const std::string& text);

/// Builds a fixture index with the standard vocabulary.
std::shared_ptr<const ConstraintIndex> build_index(const Fixture& fx);

}  // namespace kgcd::oracle
