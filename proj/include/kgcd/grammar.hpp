// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors
//
// Query template state machine:
//
//   ( SELECT [DISTINCT] ( COUNT ( ?var0 ) | ?var0 ) WHERE | ASK )
//   { ( head relation tail . )+ }
//
// head and tail are entity identifiers or variables, relation is a relation
// identifier. Variables are introduced in ascending order (?var0 first), and a
// SELECT query may only close once its projected variable occurs in a pattern.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kgcd/constraint_index.hpp"
#include "kgcd/token_mask.hpp"
#include "kgcd/trie.hpp"

namespace kgcd {

enum class SlotKind : std::uint8_t {
  QueryForm,
  ProjectionOrModifier,
  PatternHead,
  PatternRelation,
  PatternTail,
  PatternBoundary,
  End,
};

/// Position inside the query header (QueryForm / ProjectionOrModifier).
enum class HeaderPhase : std::uint8_t {
  None,
  AfterSelect,
  AfterDistinct,
  AfterCount,
  AfterCountOpen,
  AfterCountVariable,
  AfterProjection,
  AfterWhere,
  AfterAsk,
};

enum class QueryForm : std::uint8_t { Unknown, Select, Ask };

struct HeadTerm {
  enum class Kind : std::uint8_t { None, Entity, Variable };
  Kind kind = Kind::None;
  std::uint32_t value = 0;  // EntityIndex or variable number

  bool operator==(const HeadTerm&) const = default;
};

struct DecoderState {
  std::vector<TokenId> emitted;
  SlotKind slot = SlotKind::QueryForm;
  HeaderPhase phase = HeaderPhase::None;
  QueryForm form = QueryForm::Unknown;
  /// Offset in `emitted` of the '[' opening the identifier being spelled.
  std::optional<std::size_t> ident_start;
  /// Trie cursor for the identifier being spelled (entity trie at head/tail,
  /// relation trie at the relation slot). Meaningful only with ident_start.
  TokenTrie::NodeId trie_node = TokenTrie::kRoot;
  HeadTerm current_head;
  std::optional<RelationIndex> current_relation;
  bool tail_complete = false;
  std::uint16_t open_variables = 0;  // bit k set once ?vark is used
  std::uint8_t pattern_count = 0;
  bool projection_bound = false;
  /// Set by advance_lenient() once the sequence leaves the template.
  bool off_grammar = false;

  bool operator==(const DecoderState&) const = default;
};

struct GrammarConfig {
  int max_patterns = 4;
};

/// Pure transition function over DecoderState for one ConstraintIndex. The
/// index must outlive the grammar.
class Grammar {
 public:
  explicit Grammar(const ConstraintIndex& index, GrammarConfig config = {});

  const ConstraintIndex& index() const { return index_; }
  const Vocabulary& vocab() const { return index_.vocab(); }
  const GrammarConfig& config() const { return config_; }

  DecoderState initial_state() const { return {}; }

  /// Throws GrammarError if `token` is not legal at `state`. Legality here is
  /// structural plus "is a child in the trie"; connectivity pruning is the
  /// mask engine's job.
  DecoderState advance(const DecoderState& state, TokenId token) const;

  /// Never throws: an illegal token moves the state off the template, after
  /// which every token is accepted and end-of-sequence finishes.
  DecoderState advance_lenient(const DecoderState& state, TokenId token) const;

  bool is_legal(const DecoderState& state, TokenId token) const;

  /// Structural tokens legal at `state`: keywords, punctuation, identifier
  /// openers and variables. Empty in the middle of an identifier, where the
  /// trie decides.
  TokenMask grammar_allowed(const DecoderState& state) const;

  /// Variables usable at an entity slot of `state`, as a bit set.
  std::uint16_t usable_variables(const DecoderState& state) const;

  /// True when the tail slot must be ?var0 so that the projected variable
  /// still occurs before the pattern budget runs out.
  bool tail_must_bind_projection(const DecoderState& state) const;

  bool may_close(const DecoderState& state) const;
  bool may_open_pattern(const DecoderState& state) const;

 private:
  bool apply(DecoderState& st, TokenId token) const;
  bool apply_entity_slot(DecoderState& st, TokenId token, bool is_head) const;
  void use_variable(DecoderState& st, int k) const;

  const ConstraintIndex& index_;
  GrammarConfig config_;
};

std::string to_string(SlotKind slot);

}  // namespace kgcd
