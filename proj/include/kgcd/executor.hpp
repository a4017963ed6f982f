// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors
//
// Parsing and evaluation of template queries against a ConstraintIndex.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgcd/beam_search.hpp"
#include "kgcd/constraint_index.hpp"
#include "kgcd/grammar.hpp"

namespace kgcd {

struct Term {
  enum class Kind : std::uint8_t { Variable, Identifier, Iri };
  Kind kind = Kind::Variable;
  /// Variable name without '?', identifier surface "[ body ]", or IRI key
  /// without angle brackets.
  std::string text;

  bool operator==(const Term&) const = default;
};

struct TriplePattern {
  Term head, relation, tail;
  bool operator==(const TriplePattern&) const = default;
};

struct QueryAst {
  QueryForm form = QueryForm::Select;
  bool distinct = false;
  bool count = false;
  std::string projection;  // SELECT only
  std::vector<TriplePattern> patterns;

  bool operator==(const QueryAst&) const = default;
};

/// Recursive-descent parser for
///   SELECT [DISTINCT] ( ?v | COUNT ( ?v ) ) WHERE { patterns }  |  ASK { patterns }
/// where patterns are "term term term" separated by '.', with an optional
/// final '.'. Terms are ?name, "[ ... ]" identifiers or <key> IRIs. Throws
/// QueryParseError with the byte offset of the problem.
QueryAst parse_query(std::string_view text);
QueryAst parse_query(std::span<const TokenId> tokens, const Vocabulary& vocab);

struct ResultSet {
  enum class Kind : std::uint8_t { Boolean, Entities, Count };
  Kind kind = Kind::Entities;
  bool boolean = false;
  /// Sorted subject keys; without DISTINCT one entry per solution.
  std::vector<std::string> values;
  std::uint64_t count = 0;

  /// ASK results are never empty; a count of zero is.
  bool empty() const;
  /// Answer strings: the keys, the decimal count, or "true" / "false".
  std::vector<std::string> answers() const;

  bool operator==(const ResultSet&) const = default;
};

/// Conjunctive matching with left-to-right binding propagation. A term that
/// names nothing in the graph makes the result empty.
ResultSet execute(const QueryAst& ast, const ConstraintIndex& index);

/// Executability of a generated query: it parses, every concrete term names
/// a subject of the graph, and every pattern passes the connectivity checks
/// (r in out(h) for a concrete head, t in tails(r) for a concrete tail).
struct QueryCheck {
  bool parsed = false;
  bool resolved = false;
  bool connected = false;
  std::string error;

  bool executable() const { return parsed && resolved && connected; }
};
QueryCheck check_query(std::string_view text, const ConstraintIndex& index);

struct Answer {
  ResultSet result;
  std::size_t rank = 0;  // 1-based position in the ranked list
  std::string query;
};

/// Executes ranked queries in order and returns the first non-empty result.
/// Candidates that fail to parse or return nothing are skipped.
std::optional<Answer> answer(std::span<const RankedQuery> ranked,
                             const ConstraintIndex& index);

/// Replaces every resolvable "[ ... ]" identifier by "<key>".
std::string expand_iris(std::string_view query, const ConstraintIndex& index);

}  // namespace kgcd
