// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/grammar.hpp"

#include <bit>

#include "kgcd/error.hpp"

namespace kgcd {

Grammar::Grammar(const ConstraintIndex& index, GrammarConfig config)
    : index_(index), config_(config) {
  if (config_.max_patterns < 1 || config_.max_patterns > 255) {
    throw InvalidArgument("max_patterns must be in [1, 255]");
  }
}

std::uint16_t Grammar::usable_variables(const DecoderState& st) const {
  // Variables are always introduced in order, so the used set is {0..n-1}.
  const int used = std::popcount(st.open_variables);
  std::uint16_t bits = st.open_variables;
  if (used < kMaxVariables) bits |= static_cast<std::uint16_t>(1u << used);
  return bits;
}

bool Grammar::tail_must_bind_projection(const DecoderState& st) const {
  return st.form == QueryForm::Select && !st.projection_bound &&
         st.pattern_count + 1 >= config_.max_patterns &&
         !(st.current_head.kind == HeadTerm::Kind::Variable &&
           st.current_head.value == 0);
}

bool Grammar::may_close(const DecoderState& st) const {
  return st.slot == SlotKind::PatternBoundary &&
         (st.form != QueryForm::Select || st.projection_bound);
}

bool Grammar::may_open_pattern(const DecoderState& st) const {
  if (st.ident_start) return false;
  if (st.slot == SlotKind::PatternHead) return true;
  return st.slot == SlotKind::PatternBoundary &&
         st.pattern_count < config_.max_patterns;
}

void Grammar::use_variable(DecoderState& st, int k) const {
  st.open_variables |= static_cast<std::uint16_t>(1u << k);
  if (st.form == QueryForm::Select && k == 0) st.projection_bound = true;
}

bool Grammar::apply_entity_slot(DecoderState& st, TokenId t,
                                bool is_head) const {
  const auto& rv = vocab().reserved();
  const TokenTrie& trie = index_.entity_trie();
  if (st.ident_start) {
    auto next = trie.child(st.trie_node, t);
    if (!next) return false;
    if (t == rv.close_bracket) {
      const auto payload = trie.node(*next).payload;
      if (payload == TokenTrie::kNoPayload) return false;
      st.ident_start.reset();
      st.trie_node = TokenTrie::kRoot;
      if (is_head) {
        st.current_head = {HeadTerm::Kind::Entity, payload};
        st.slot = SlotKind::PatternRelation;
      } else {
        st.tail_complete = true;
      }
    } else {
      st.trie_node = *next;
    }
    return true;
  }

  const bool obligated = !is_head && tail_must_bind_projection(st);
  if (t == rv.open_bracket) {
    if (obligated) return false;
    auto next = trie.child(TokenTrie::kRoot, t);
    if (!next) return false;
    st.ident_start = st.emitted.size();
    st.trie_node = *next;
    st.slot = is_head ? SlotKind::PatternHead : SlotKind::PatternTail;
    return true;
  }
  if (auto k = vocab().variable_index(t)) {
    if (!((usable_variables(st) >> *k) & 1)) return false;
    if (obligated && *k != 0) return false;
    use_variable(st, *k);
    if (is_head) {
      st.current_head = {HeadTerm::Kind::Variable, static_cast<std::uint32_t>(*k)};
      st.slot = SlotKind::PatternRelation;
    } else {
      st.tail_complete = true;
    }
    return true;
  }
  return false;
}

bool Grammar::apply(DecoderState& st, TokenId t) const {
  const auto& rv = vocab().reserved();
  switch (st.slot) {
    case SlotKind::QueryForm:
      if (t == rv.select) {
        st.form = QueryForm::Select;
        st.phase = HeaderPhase::AfterSelect;
      } else if (t == rv.ask) {
        st.form = QueryForm::Ask;
        st.phase = HeaderPhase::AfterAsk;
      } else {
        return false;
      }
      st.slot = SlotKind::ProjectionOrModifier;
      break;

    case SlotKind::ProjectionOrModifier: {
      const bool is_var0 = t == rv.variables[0];
      switch (st.phase) {
        case HeaderPhase::AfterSelect:
          if (t == rv.distinct) {
            st.phase = HeaderPhase::AfterDistinct;
            break;
          }
          [[fallthrough]];
        case HeaderPhase::AfterDistinct:
          if (t == rv.count) {
            st.phase = HeaderPhase::AfterCount;
          } else if (is_var0) {
            st.open_variables |= 1;
            st.phase = HeaderPhase::AfterProjection;
          } else {
            return false;
          }
          break;
        case HeaderPhase::AfterCount:
          if (t != rv.open_paren) return false;
          st.phase = HeaderPhase::AfterCountOpen;
          break;
        case HeaderPhase::AfterCountOpen:
          if (!is_var0) return false;
          st.open_variables |= 1;
          st.phase = HeaderPhase::AfterCountVariable;
          break;
        case HeaderPhase::AfterCountVariable:
          if (t != rv.close_paren) return false;
          st.phase = HeaderPhase::AfterProjection;
          break;
        case HeaderPhase::AfterProjection:
          if (t != rv.where) return false;
          st.phase = HeaderPhase::AfterWhere;
          break;
        case HeaderPhase::AfterWhere:
        case HeaderPhase::AfterAsk:
          if (t != rv.open_brace) return false;
          st.phase = HeaderPhase::None;
          st.slot = SlotKind::PatternHead;
          break;
        case HeaderPhase::None:
          return false;
      }
      break;
    }

    case SlotKind::PatternHead:
      if (!apply_entity_slot(st, t, true)) return false;
      break;

    case SlotKind::PatternRelation: {
      const TokenTrie& trie = index_.relation_trie();
      if (!st.ident_start) {
        if (t != rv.open_bracket) return false;
        auto next = trie.child(TokenTrie::kRoot, t);
        if (!next) return false;
        st.ident_start = st.emitted.size();
        st.trie_node = *next;
        break;
      }
      auto next = trie.child(st.trie_node, t);
      if (!next) return false;
      if (t == rv.close_bracket) {
        const auto payload = trie.node(*next).payload;
        if (payload == TokenTrie::kNoPayload) return false;
        st.ident_start.reset();
        st.trie_node = TokenTrie::kRoot;
        st.current_relation = payload;
        st.slot = SlotKind::PatternTail;
      } else {
        st.trie_node = *next;
      }
      break;
    }

    case SlotKind::PatternTail:
      if (st.tail_complete) {
        if (t != rv.dot) return false;
        ++st.pattern_count;
        st.current_head = {};
        st.current_relation.reset();
        st.tail_complete = false;
        st.slot = SlotKind::PatternBoundary;
        break;
      }
      if (!apply_entity_slot(st, t, false)) return false;
      break;

    case SlotKind::PatternBoundary:
      if (t == rv.close_brace) {
        if (!may_close(st)) return false;
        st.slot = SlotKind::End;
        break;
      }
      if (!may_open_pattern(st)) return false;
      if (!apply_entity_slot(st, t, true)) return false;
      break;

    case SlotKind::End:
      return false;
  }
  st.emitted.push_back(t);
  return true;
}

DecoderState Grammar::advance(const DecoderState& state, TokenId token) const {
  if (state.off_grammar) {
    throw GrammarError("state has left the query template");
  }
  DecoderState next = state;
  if (token >= vocab().size() || !apply(next, token)) {
    throw GrammarError("token " +
                       (token < vocab().size() ? "'" + vocab().text(token) + "'"
                                               : std::to_string(token)) +
                       " not allowed in " + to_string(state.slot) + " slot");
  }
  return next;
}

DecoderState Grammar::advance_lenient(const DecoderState& state,
                                      TokenId token) const {
  if (state.slot == SlotKind::End) return state;
  if (!state.off_grammar) {
    DecoderState next = state;
    if (token < vocab().size() && apply(next, token)) return next;
  }
  DecoderState next = state;
  next.off_grammar = true;
  next.emitted.push_back(token);
  if (token == vocab().reserved().end_of_sequence) next.slot = SlotKind::End;
  return next;
}

bool Grammar::is_legal(const DecoderState& state, TokenId token) const {
  if (state.off_grammar || token >= vocab().size()) return false;
  DecoderState probe = state;
  return apply(probe, token);
}

TokenMask Grammar::grammar_allowed(const DecoderState& st) const {
  TokenMask m(vocab().size());
  if (st.off_grammar || st.ident_start) return m;
  const auto& rv = vocab().reserved();

  auto entity_openers = [&](bool is_head) {
    const bool obligated = !is_head && tail_must_bind_projection(st);
    if (obligated) {
      m.set(rv.variables[0]);
      return;
    }
    if (index_.entity_trie().child(TokenTrie::kRoot, rv.open_bracket)) {
      m.set(rv.open_bracket);
    }
    const auto vars = usable_variables(st);
    for (int k = 0; k < kMaxVariables; ++k) {
      if ((vars >> k) & 1) m.set(rv.variables[k]);
    }
  };

  switch (st.slot) {
    case SlotKind::QueryForm:
      m.set(rv.select);
      m.set(rv.ask);
      break;
    case SlotKind::ProjectionOrModifier:
      switch (st.phase) {
        case HeaderPhase::AfterSelect:
          m.set(rv.distinct);
          [[fallthrough]];
        case HeaderPhase::AfterDistinct:
          m.set(rv.count);
          m.set(rv.variables[0]);
          break;
        case HeaderPhase::AfterCount:
          m.set(rv.open_paren);
          break;
        case HeaderPhase::AfterCountOpen:
          m.set(rv.variables[0]);
          break;
        case HeaderPhase::AfterCountVariable:
          m.set(rv.close_paren);
          break;
        case HeaderPhase::AfterProjection:
          m.set(rv.where);
          break;
        case HeaderPhase::AfterWhere:
        case HeaderPhase::AfterAsk:
          m.set(rv.open_brace);
          break;
        case HeaderPhase::None:
          break;
      }
      break;
    case SlotKind::PatternHead:
      entity_openers(true);
      break;
    case SlotKind::PatternRelation:
      if (index_.relation_trie().child(TokenTrie::kRoot, rv.open_bracket)) {
        m.set(rv.open_bracket);
      }
      break;
    case SlotKind::PatternTail:
      if (st.tail_complete) {
        m.set(rv.dot);
      } else {
        entity_openers(false);
      }
      break;
    case SlotKind::PatternBoundary:
      if (may_close(st)) m.set(rv.close_brace);
      if (may_open_pattern(st)) entity_openers(true);
      break;
    case SlotKind::End:
      break;
  }
  return m;
}

std::string to_string(SlotKind slot) {
  switch (slot) {
    case SlotKind::QueryForm: return "query-form";
    case SlotKind::ProjectionOrModifier: return "projection";
    case SlotKind::PatternHead: return "head";
    case SlotKind::PatternRelation: return "relation";
    case SlotKind::PatternTail: return "tail";
    case SlotKind::PatternBoundary: return "pattern-boundary";
    case SlotKind::End: return "end";
  }
  return "?";
}

}  // namespace kgcd
