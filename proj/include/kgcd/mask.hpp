// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kgcd/grammar.hpp"
#include "kgcd/token_mask.hpp"
#include "kgcd/trie.hpp"

namespace kgcd {

enum class MaskMode : std::uint8_t {
  /// Grammar, identifier tries and graph connectivity.
  Full,
  /// Grammar and identifier tries only.
  NoPruning,
  /// Every token, always.
  Unconstrained,
};

std::string_view to_string(MaskMode mode);
std::optional<MaskMode> parse_mask_mode(std::string_view text);

struct MaskOptions {
  MaskMode mode = MaskMode::Full;
  /// Restrict a tail after a concrete head to {t : (h, r, t)} instead of the
  /// tails of r.
  bool strict_pairs = false;
};

/// Tokens allowed next at `state`.
///
/// In Full mode an entity at the head slot must have an outgoing relation, a
/// relation after a concrete head h must be in out(h), and an entity at the
/// tail slot must be a tail of the chosen relation. Variable heads leave the
/// relation unrestricted.
TokenMask allowed_tokens(const Grammar& grammar, const DecoderState& state,
                         const MaskOptions& options);

/// Fewest tokens that turn `state` into a finished query when every step
/// follows the mask; nullopt if no completion exists.
std::optional<std::size_t> min_completion(const Grammar& grammar,
                                          const DecoderState& state,
                                          const MaskOptions& options);

/// Children of `node` whose subtree contains a terminal with a leaf rank in
/// `sorted_ranks`, added to `out`.
void add_children_with_ranks(const TokenTrie& trie, TokenTrie::NodeId node,
                             std::span<const std::uint32_t> sorted_ranks,
                             TokenMask& out);

/// Next tokens after `prefix` restricted to sequences whose payload is in
/// `payloads`. Empty if `prefix` is not in the trie.
std::vector<TokenId> restrict_trie_by_subjects(
    const TokenTrie& trie, std::span<const TokenId> prefix,
    std::span<const std::uint32_t> payloads);

/// Copy of `scores` with every disallowed position set to -infinity. Throws
/// InvalidArgument if the sizes differ.
std::vector<double> apply_mask(std::span<const double> scores,
                               const TokenMask& mask);

}  // namespace kgcd
