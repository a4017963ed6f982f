// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgcd/identifiers.hpp"
#include "kgcd/kg_store.hpp"
#include "kgcd/trie.hpp"
#include "kgcd/vocabulary.hpp"

namespace kgcd {

/// Everything the decoder consults about one knowledge graph: the graph, its
/// identifier table, an entity trie and a relation trie, and the connectivity
/// indices re-expressed as sorted leaf-rank lists so that pruning a trie level
/// to a subject subset is a binary search per child.
///
/// Trie payloads are EntityIndex / RelationIndex values.
class ConstraintIndex {
 public:
  /// Throws TokenizeError if an identifier cannot be spelled in `vocab`, and
  /// InvalidArgument for inconsistent labels.
  static std::shared_ptr<const ConstraintIndex> build(
      KnowledgeGraph graph, std::span<const LabelRecord> labels,
      Vocabulary vocab);

  /// Index file written by save(): graph triples, identifier surfaces and
  /// both serialized tries behind a versioned header.
  static std::shared_ptr<const ConstraintIndex> load(
      const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  const KnowledgeGraph& graph() const { return graph_; }
  const Vocabulary& vocab() const { return vocab_; }
  const std::vector<Identifier>& entity_identifiers() const {
    return identifiers_.entities;
  }
  const std::vector<Identifier>& relation_identifiers() const {
    return identifiers_.relations;
  }
  const TokenTrie& entity_trie() const { return entity_trie_; }
  const TokenTrie& relation_trie() const { return relation_trie_; }

  std::optional<EntityIndex> entity_by_surface(std::string_view surface) const;
  std::optional<RelationIndex> relation_by_surface(
      std::string_view surface) const;

  // Sorted leaf ranks used by the pruning masks.
  /// Entity-trie ranks of entities with at least one outgoing relation.
  std::span<const std::uint32_t> heads_with_outgoing() const {
    return heads_with_outgoing_;
  }
  /// Relation-trie ranks of outgoing_relations(e).
  std::span<const std::uint32_t> outgoing_ranks(EntityIndex e) const {
    return outgoing_ranks_[e];
  }
  /// Entity-trie ranks of tail_entities(r).
  std::span<const std::uint32_t> tail_ranks(RelationIndex r) const {
    return tail_ranks_[r];
  }
  /// Entity-trie ranks of { t : (h, r, t) in the graph }.
  std::vector<std::uint32_t> pair_tail_ranks(EntityIndex h,
                                             RelationIndex r) const;

  /// Entity-trie ranks of an arbitrary subject set (unsorted input allowed).
  std::vector<std::uint32_t> entity_ranks(std::span<const EntityIndex> es) const;
  std::vector<std::uint32_t> relation_ranks(
      std::span<const RelationIndex> rs) const;

 private:
  ConstraintIndex() = default;
  void build_derived();

  KnowledgeGraph graph_;
  Vocabulary vocab_ = Vocabulary::standard();
  IdentifierTable identifiers_;
  TokenTrie entity_trie_;
  TokenTrie relation_trie_;
  std::unordered_map<std::string, EntityIndex> entity_surface_;
  std::unordered_map<std::string, RelationIndex> relation_surface_;
  std::vector<std::uint32_t> heads_with_outgoing_;
  std::vector<std::vector<std::uint32_t>> outgoing_ranks_;
  std::vector<std::vector<std::uint32_t>> tail_ranks_;
};

}  // namespace kgcd
