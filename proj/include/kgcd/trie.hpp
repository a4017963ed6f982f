// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "kgcd/vocabulary.hpp"

namespace kgcd {

/// Immutable prefix trie over token sequences, stored as flat arrays.
///
/// Children of a node are sorted by token id. Every terminal node carries a
/// payload (the caller's subject index). Terminals are numbered in depth-first
/// order ("leaf ranks"), so each node covers a contiguous rank range; this is
/// what lets a subject subset be tested against a subtree with one binary
/// search. Memory is linear in the total number of inserted tokens.
class TokenTrie {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kRoot = 0;
  static constexpr std::uint32_t kNoPayload = 0xffffffffu;

  struct Edge {
    TokenId token;
    NodeId child;
    bool operator==(const Edge&) const = default;
  };

  struct Node {
    std::uint32_t first_edge = 0;
    std::uint32_t num_edges = 0;
    std::uint32_t payload = kNoPayload;
    std::uint32_t leaf_begin = 0;
    std::uint32_t leaf_end = 0;
    bool operator==(const Node&) const = default;
  };

  /// Builds an empty trie (a root with no children).
  TokenTrie();

  /// payloads[i] is attached to sequences[i]. Throws InvalidArgument on a
  /// duplicate or empty sequence.
  static TokenTrie build(std::span<const std::vector<TokenId>> sequences,
                         std::span<const std::uint32_t> payloads);
  /// Payload i for sequence i.
  static TokenTrie build(std::span<const std::vector<TokenId>> sequences);

  bool empty() const { return num_terminals() == 0; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_terminals() const { return leaf_payloads_.size(); }

  const Node& node(NodeId id) const { return nodes_[id]; }
  std::span<const Edge> children(NodeId id) const {
    const Node& n = nodes_[id];
    return std::span<const Edge>(edges_).subspan(n.first_edge, n.num_edges);
  }
  std::optional<NodeId> child(NodeId id, TokenId token) const;
  std::optional<NodeId> walk(std::span<const TokenId> prefix) const;

  /// { w : prefix + w is a prefix of some inserted sequence }, sorted.
  std::vector<TokenId> allowed_continuations(
      std::span<const TokenId> prefix) const;

  /// Payload of the sequence equal to `seq`, nullopt for a proper prefix or
  /// anything not inserted.
  std::optional<std::uint32_t> complete_key(std::span<const TokenId> seq) const;

  /// Leaf rank of the terminal carrying `payload`.
  std::optional<std::uint32_t> leaf_rank(std::uint32_t payload) const;
  std::uint32_t payload_at_rank(std::uint32_t rank) const {
    return leaf_payloads_[rank];
  }

  /// Versioned little-endian binary form. The header declares the byte width
  /// used for token ids (2 or 4).
  void serialize(std::ostream& out) const;
  static TokenTrie deserialize(std::istream& in);

  bool operator==(const TokenTrie&) const = default;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> leaf_payloads_;       // by leaf rank
  std::vector<std::uint32_t> rank_of_payload_;     // by payload, or kNoPayload
};

}  // namespace kgcd
