// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors
//
// Immutable in-memory knowledge graph. Both connectivity indices
// (entity -> outgoing relations, relation -> tail entities) are built eagerly
// so that decoding never pays for a lookup beyond an array access.

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgcd {

struct EntityId {
  std::string value;
  auto operator<=>(const EntityId&) const = default;
};

struct RelationId {
  std::string value;
  auto operator<=>(const RelationId&) const = default;
};

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;
  auto operator<=>(const Triple&) const = default;
};

using EntityIndex = std::uint32_t;
using RelationIndex = std::uint32_t;

/// Triple over dense indices. Ordered by (head, relation, tail).
struct IndexedTriple {
  EntityIndex head;
  RelationIndex relation;
  EntityIndex tail;
  auto operator<=>(const IndexedTriple&) const = default;
};

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  /// Deduplicates the input; the result does not depend on input order.
  /// Throws InvalidArgument on an empty component.
  static KnowledgeGraph build(std::span<const Triple> triples);

  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  std::size_t num_triples() const { return triples_.size(); }

  // Keys are stored sorted; an index is a position in these vectors.
  const std::vector<std::string>& entity_keys() const { return entities_; }
  const std::vector<std::string>& relation_keys() const { return relations_; }
  const std::string& entity_key(EntityIndex e) const { return entities_[e]; }
  const std::string& relation_key(RelationIndex r) const { return relations_[r]; }

  std::optional<EntityIndex> find_entity(std::string_view key) const;
  std::optional<RelationIndex> find_relation(std::string_view key) const;

  // Key-level queries. Unknown keys yield empty results.
  std::vector<RelationId> outgoing_relations(const EntityId& e) const;
  std::vector<EntityId> tail_entities(const RelationId& r) const;
  bool contains_triple(const EntityId& h, const RelationId& r,
                       const EntityId& t) const;

  // Index-level queries used on the decoding hot path. Results are sorted.
  std::span<const RelationIndex> outgoing(EntityIndex e) const {
    return out_relations_[e];
  }
  std::span<const EntityIndex> tails(RelationIndex r) const {
    return relation_tails_[r];
  }
  bool contains(EntityIndex h, RelationIndex r, EntityIndex t) const;

  /// Tails t with (h, r, t) in the graph, sorted.
  std::vector<EntityIndex> pair_tails(EntityIndex h, RelationIndex r) const;

  /// All triples sorted by (head, relation, tail).
  std::span<const IndexedTriple> triples() const { return triples_; }
  /// Triples with the given head (contiguous range of triples()).
  std::span<const IndexedTriple> triples_with_head(EntityIndex h) const;
  /// Triples with the given relation, sorted by (head, tail).
  std::span<const IndexedTriple> triples_with_relation(RelationIndex r) const;

  std::vector<Triple> to_triples() const;

  bool operator==(const KnowledgeGraph& other) const {
    return entities_ == other.entities_ && relations_ == other.relations_ &&
           triples_ == other.triples_;
  }

 private:
  std::vector<std::string> entities_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, EntityIndex> entity_lookup_;
  std::unordered_map<std::string, RelationIndex> relation_lookup_;
  std::vector<IndexedTriple> triples_;
  std::vector<std::size_t> head_offsets_;  // size num_entities + 1
  std::vector<IndexedTriple> by_relation_;
  std::vector<std::size_t> relation_offsets_;  // size num_relations + 1
  std::vector<std::vector<RelationIndex>> out_relations_;
  std::vector<std::vector<EntityIndex>> relation_tails_;
};

/// Tab-separated triples file: head, relation, tail. '#' starts a comment
/// line; blank lines are skipped. Throws FormatError with the line number.
std::vector<Triple> read_triples_file(const std::filesystem::path& path);
std::vector<Triple> parse_triples(std::string_view text,
                                  const std::string& source = "<memory>");
void write_triples_file(const std::filesystem::path& path,
                        std::span<const Triple> triples);

}  // namespace kgcd
