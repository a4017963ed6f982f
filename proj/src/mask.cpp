// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/mask.hpp"

#include <algorithm>
#include <limits>

#include "kgcd/error.hpp"

namespace kgcd {
namespace {

void add_all_children(const TokenTrie& trie, TokenTrie::NodeId node,
                      TokenMask& out) {
  for (const auto& e : trie.children(node)) out.set(e.token);
}

// Identifier slot: either the opener (when some candidate survives) or the
// candidates' continuations below the cursor. `ranks` == nullptr means no
// pruning.
void identifier_slot(const TokenTrie& trie, const DecoderState& st,
                     TokenId open_bracket,
                     const std::span<const std::uint32_t>* ranks,
                     TokenMask& m) {
  if (st.ident_start) {
    if (ranks) {
      add_children_with_ranks(trie, st.trie_node, *ranks, m);
    } else {
      add_all_children(trie, st.trie_node, m);
    }
    return;
  }
  if (!ranks || !m.test(open_bracket)) return;
  // Every identifier starts with '[', so the opener survives iff any
  // candidate does.
  if (ranks->empty()) m.reset(open_bracket);
}

}  // namespace

std::string_view to_string(MaskMode mode) {
  switch (mode) {
    case MaskMode::Full: return "full";
    case MaskMode::NoPruning: return "no-pruning";
    case MaskMode::Unconstrained: return "unconstrained";
  }
  return "?";
}

std::optional<MaskMode> parse_mask_mode(std::string_view text) {
  if (text == "full") return MaskMode::Full;
  if (text == "no-pruning") return MaskMode::NoPruning;
  if (text == "unconstrained") return MaskMode::Unconstrained;
  return std::nullopt;
}

void add_children_with_ranks(const TokenTrie& trie, TokenTrie::NodeId node,
                             std::span<const std::uint32_t> sorted_ranks,
                             TokenMask& out) {
  for (const auto& e : trie.children(node)) {
    const auto& c = trie.node(e.child);
    auto it = std::lower_bound(sorted_ranks.begin(), sorted_ranks.end(),
                               c.leaf_begin);
    if (it != sorted_ranks.end() && *it < c.leaf_end) out.set(e.token);
  }
}

std::vector<TokenId> restrict_trie_by_subjects(
    const TokenTrie& trie, std::span<const TokenId> prefix,
    std::span<const std::uint32_t> payloads) {
  std::vector<TokenId> out;
  auto node = trie.walk(prefix);
  if (!node) return out;
  std::vector<std::uint32_t> ranks;
  for (auto p : payloads) {
    if (auto r = trie.leaf_rank(p)) ranks.push_back(*r);
  }
  std::sort(ranks.begin(), ranks.end());
  for (const auto& e : trie.children(*node)) {
    const auto& c = trie.node(e.child);
    auto it = std::lower_bound(ranks.begin(), ranks.end(), c.leaf_begin);
    if (it != ranks.end() && *it < c.leaf_end) out.push_back(e.token);
  }
  return out;
}

TokenMask allowed_tokens(const Grammar& grammar, const DecoderState& st,
                         const MaskOptions& options) {
  const Vocabulary& vocab = grammar.vocab();
  const auto& rv = vocab.reserved();

  if (options.mode == MaskMode::Unconstrained) {
    if (st.slot == SlotKind::End) return TokenMask(vocab.size());
    TokenMask m = TokenMask::all(vocab.size());
    if (st.emitted.empty()) m.reset(rv.end_of_sequence);
    return m;
  }
  if (st.off_grammar) return TokenMask(vocab.size());

  TokenMask m = grammar.grammar_allowed(st);
  const ConstraintIndex& idx = grammar.index();
  const bool full = options.mode == MaskMode::Full;

  switch (st.slot) {
    case SlotKind::PatternHead:
    case SlotKind::PatternBoundary: {
      if (st.slot == SlotKind::PatternBoundary && !grammar.may_open_pattern(st)) {
        break;
      }
      const auto heads = idx.heads_with_outgoing();
      identifier_slot(idx.entity_trie(), st, rv.open_bracket,
                      full ? &heads : nullptr, m);
      break;
    }
    case SlotKind::PatternRelation: {
      std::span<const std::uint32_t> rels;
      const bool prune =
          full && st.current_head.kind == HeadTerm::Kind::Entity;
      if (prune) rels = idx.outgoing_ranks(st.current_head.value);
      identifier_slot(idx.relation_trie(), st, rv.open_bracket,
                      prune ? &rels : nullptr, m);
      break;
    }
    case SlotKind::PatternTail: {
      if (st.tail_complete) break;
      if (!st.ident_start && !m.test(rv.open_bracket)) break;
      std::vector<std::uint32_t> pair_ranks;
      std::span<const std::uint32_t> tails;
      if (full) {
        const RelationIndex r = *st.current_relation;
        if (options.strict_pairs &&
            st.current_head.kind == HeadTerm::Kind::Entity) {
          pair_ranks = idx.pair_tail_ranks(st.current_head.value, r);
          tails = pair_ranks;
        } else {
          tails = idx.tail_ranks(r);
        }
      }
      identifier_slot(idx.entity_trie(), st, rv.open_bracket,
                      full ? &tails : nullptr, m);
      break;
    }
    default:
      break;
  }
  return m;
}

namespace {

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

std::size_t plus(std::size_t a, std::size_t b) {
  return a == kNever || b == kNever ? kNever : a + b;
}

std::size_t shortest(const std::vector<Identifier>& ids,
                     std::span<const std::uint32_t> payloads) {
  std::size_t best = kNever;
  for (auto p : payloads) best = std::min(best, ids[p].token_seq.size());
  return best;
}

std::size_t shortest_relation(const ConstraintIndex& idx) {
  std::size_t best = kNever;
  for (const auto& id : idx.relation_identifiers()) {
    best = std::min(best, id.token_seq.size());
  }
  return best;
}

// Cheapest completion of the identifier under the cursor, over terminals whose
// rank is in `ranks` (all of them if null), plus `extra(payload)`.
template <typename Extra>
std::size_t finish_identifier(const TokenTrie& trie, const DecoderState& st,
                              const std::vector<Identifier>& ids,
                              const std::span<const std::uint32_t>* ranks,
                              Extra extra) {
  const auto& node = trie.node(st.trie_node);
  const std::size_t consumed = st.emitted.size() - *st.ident_start;
  std::size_t best = kNever;
  auto visit = [&](std::uint32_t rank) {
    const auto payload = trie.payload_at_rank(rank);
    best = std::min(best, plus(ids[payload].token_seq.size() - consumed, extra(payload)));
  };
  if (ranks) {
    auto it = std::lower_bound(ranks->begin(), ranks->end(), node.leaf_begin);
    for (; it != ranks->end() && *it < node.leaf_end; ++it) visit(*it);
  } else {
    for (auto r = node.leaf_begin; r < node.leaf_end; ++r) visit(r);
  }
  return best;
}

}  // namespace

std::optional<std::size_t> min_completion(const Grammar& grammar,
                                          const DecoderState& st,
                                          const MaskOptions& options) {
  if (st.slot == SlotKind::End) return 0;
  if (options.mode == MaskMode::Unconstrained) return st.emitted.empty() ? 2 : 1;
  if (st.off_grammar) return std::nullopt;

  const ConstraintIndex& idx = grammar.index();
  const bool full = options.mode == MaskMode::Full;
  const auto& ents = idx.entity_identifiers();
  const auto& rels = idx.relation_identifiers();
  const std::size_t any_rel = shortest_relation(idx);
  // Variable tail (binding ?var0 when needed), '.', '}'.
  constexpr std::size_t kTail = 3;
  // '?var0' head, relation, tail.
  const std::size_t body = plus(1 + kTail, any_rel);
  auto relation_after = [&](EntityIndex h) {
    if (!full) return any_rel;
    std::vector<std::uint32_t> out;
    for (auto r : idx.graph().outgoing(h)) out.push_back(r);
    return shortest(rels, out);
  };
  // After the '.' that ends the current pattern.
  auto closing = [&]() -> std::size_t {
    if (st.form != QueryForm::Select || st.projection_bound) return 1;
    return st.pattern_count + 1 < grammar.config().max_patterns ? body : kNever;
  };

  std::size_t n = kNever;
  switch (st.slot) {
    case SlotKind::QueryForm:
      n = plus(2, body);  // ASK {
      break;
    case SlotKind::ProjectionOrModifier: {
      std::size_t header = 0;
      switch (st.phase) {
        case HeaderPhase::AfterSelect:
        case HeaderPhase::AfterDistinct: header = 3; break;
        case HeaderPhase::AfterCount: header = 5; break;
        case HeaderPhase::AfterCountOpen: header = 4; break;
        case HeaderPhase::AfterCountVariable: header = 3; break;
        case HeaderPhase::AfterProjection: header = 2; break;
        case HeaderPhase::AfterWhere:
        case HeaderPhase::AfterAsk: header = 1; break;
        case HeaderPhase::None: header = kNever; break;
      }
      n = plus(header, body);
      break;
    }
    case SlotKind::PatternHead:
    case SlotKind::PatternBoundary:
      if (st.ident_start) {
        const auto heads = idx.heads_with_outgoing();
        n = plus(finish_identifier(idx.entity_trie(), st, ents, full ? &heads : nullptr,
                                   relation_after),
                 kTail);
        break;
      }
      if (grammar.may_close(st)) n = 1;
      if (grammar.may_open_pattern(st)) n = std::min(n, body);
      break;
    case SlotKind::PatternRelation: {
      const bool prune = full && st.current_head.kind == HeadTerm::Kind::Entity;
      if (!st.ident_start) {
        n = plus(prune ? relation_after(st.current_head.value) : any_rel, kTail);
        break;
      }
      std::span<const std::uint32_t> ranks;
      if (prune) ranks = idx.outgoing_ranks(st.current_head.value);
      n = plus(finish_identifier(idx.relation_trie(), st, rels, prune ? &ranks : nullptr,
                                 [](std::uint32_t) { return std::size_t{0}; }),
               kTail);
      break;
    }
    case SlotKind::PatternTail: {
      if (st.tail_complete) {
        n = plus(1, closing());
        break;
      }
      if (!st.ident_start) {
        n = kTail;
        break;
      }
      std::vector<std::uint32_t> pair_ranks;
      std::span<const std::uint32_t> tails;
      if (full) {
        if (options.strict_pairs && st.current_head.kind == HeadTerm::Kind::Entity) {
          pair_ranks = idx.pair_tail_ranks(st.current_head.value, *st.current_relation);
          tails = pair_ranks;
        } else {
          tails = idx.tail_ranks(*st.current_relation);
        }
      }
      n = plus(finish_identifier(idx.entity_trie(), st, ents, full ? &tails : nullptr,
                                 [](std::uint32_t) { return std::size_t{0}; }),
               plus(1, closing()));
      break;
    }
    case SlotKind::End:
      n = 0;
      break;
  }
  if (n == kNever) return std::nullopt;
  return n;
}

std::vector<double> apply_mask(std::span<const double> scores,
                               const TokenMask& mask) {
  if (scores.size() != mask.vocab_size()) {
    throw InvalidArgument("apply_mask: score vector has " +
                          std::to_string(scores.size()) +
                          " entries, mask covers " +
                          std::to_string(mask.vocab_size()));
  }
  std::vector<double> out(scores.begin(), scores.end());
  const double neg_inf = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask.test(static_cast<TokenId>(i))) out[i] = neg_inf;
  }
  return out;
}

}  // namespace kgcd
