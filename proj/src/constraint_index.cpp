// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/constraint_index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "binary_io.hpp"
#include "kgcd/error.hpp"

namespace kgcd {
namespace {

constexpr char kIndexMagic[8] = {'K', 'G', 'C', 'D', 'I', 'N', 'D', 'X'};
constexpr std::uint32_t kIndexVersion = 1;

TokenTrie trie_for(const std::vector<Identifier>& ids) {
  std::vector<std::vector<TokenId>> seqs;
  seqs.reserve(ids.size());
  for (const auto& id : ids) seqs.push_back(id.token_seq);
  return TokenTrie::build(seqs);
}

}  // namespace

std::shared_ptr<const ConstraintIndex> ConstraintIndex::build(
    KnowledgeGraph graph, std::span<const LabelRecord> labels,
    Vocabulary vocab) {
  std::shared_ptr<ConstraintIndex> idx(new ConstraintIndex());
  idx->identifiers_ = build_identifier_table(graph, labels, vocab);
  idx->graph_ = std::move(graph);
  idx->vocab_ = std::move(vocab);
  idx->entity_trie_ = trie_for(idx->identifiers_.entities);
  idx->relation_trie_ = trie_for(idx->identifiers_.relations);
  idx->build_derived();
  return idx;
}

void ConstraintIndex::build_derived() {
  entity_surface_.clear();
  relation_surface_.clear();
  for (EntityIndex e = 0; e < identifiers_.entities.size(); ++e) {
    entity_surface_.emplace(identifiers_.entities[e].surface, e);
  }
  for (RelationIndex r = 0; r < identifiers_.relations.size(); ++r) {
    relation_surface_.emplace(identifiers_.relations[r].surface, r);
  }

  heads_with_outgoing_.clear();
  outgoing_ranks_.assign(graph_.num_entities(), {});
  for (EntityIndex e = 0; e < graph_.num_entities(); ++e) {
    auto out = graph_.outgoing(e);
    if (!out.empty()) heads_with_outgoing_.push_back(*entity_trie_.leaf_rank(e));
    outgoing_ranks_[e] = relation_ranks(out);
  }
  std::sort(heads_with_outgoing_.begin(), heads_with_outgoing_.end());

  tail_ranks_.assign(graph_.num_relations(), {});
  for (RelationIndex r = 0; r < graph_.num_relations(); ++r) {
    tail_ranks_[r] = entity_ranks(graph_.tails(r));
  }
}

std::optional<EntityIndex> ConstraintIndex::entity_by_surface(
    std::string_view surface) const {
  auto it = entity_surface_.find(std::string(surface));
  if (it == entity_surface_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationIndex> ConstraintIndex::relation_by_surface(
    std::string_view surface) const {
  auto it = relation_surface_.find(std::string(surface));
  if (it == relation_surface_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::uint32_t> ConstraintIndex::pair_tail_ranks(
    EntityIndex h, RelationIndex r) const {
  return entity_ranks(graph_.pair_tails(h, r));
}

std::vector<std::uint32_t> ConstraintIndex::entity_ranks(
    std::span<const EntityIndex> es) const {
  std::vector<std::uint32_t> out;
  out.reserve(es.size());
  for (EntityIndex e : es) {
    if (auto rank = entity_trie_.leaf_rank(e)) out.push_back(*rank);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint32_t> ConstraintIndex::relation_ranks(
    std::span<const RelationIndex> rs) const {
  std::vector<std::uint32_t> out;
  out.reserve(rs.size());
  for (RelationIndex r : rs) {
    if (auto rank = relation_trie_.leaf_rank(r)) out.push_back(*rank);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void ConstraintIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write index file: " + path.string());
  out.write(kIndexMagic, sizeof(kIndexMagic));
  bin::put_u32(out, kIndexVersion);
  bin::put_u32(out, vocab_.size() <= 0x10000 ? 2 : 4);

  bin::put_u64(out, vocab_.size());
  for (const auto& t : vocab_.tokens()) bin::put_string(out, t);

  auto put_ids = [&](const std::vector<Identifier>& ids) {
    bin::put_u64(out, ids.size());
    for (const auto& id : ids) {
      bin::put_string(out, id.subject_key);
      bin::put_string(out, id.surface);
    }
  };
  put_ids(identifiers_.entities);
  put_ids(identifiers_.relations);

  bin::put_u64(out, graph_.num_triples());
  for (const auto& t : graph_.triples()) {
    bin::put_u32(out, t.head);
    bin::put_u32(out, t.relation);
    bin::put_u32(out, t.tail);
  }
  entity_trie_.serialize(out);
  relation_trie_.serialize(out);
  if (!out) throw IoError("failed writing index file: " + path.string());
}

std::shared_ptr<const ConstraintIndex> ConstraintIndex::load(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index file: " + path.string());
  const std::string name = path.string();
  try {
    char magic[8];
    if (!in.read(magic, sizeof(magic)) ||
        std::memcmp(magic, kIndexMagic, sizeof(magic)) != 0) {
      throw FormatError(name, 0, "not an index file");
    }
    const auto version = bin::get_u32(in);
    if (version != kIndexVersion) {
      throw FormatError(name, 0,
                        "unsupported index version " + std::to_string(version));
    }
    const auto width = bin::get_u32(in);
    if (width != 2 && width != 4) {
      throw FormatError(name, 0, "unsupported token width");
    }

    std::vector<std::string> tokens(bin::get_count(in, 4));
    for (auto& t : tokens) t = bin::get_string(in);

    std::shared_ptr<ConstraintIndex> idx(new ConstraintIndex());
    idx->vocab_ = Vocabulary(std::move(tokens));

    auto get_ids = [&](std::vector<Identifier>& ids) {
      ids.resize(bin::get_count(in, 8));
      for (auto& id : ids) {
        id.subject_key = bin::get_string(in);
        id.surface = bin::get_string(in);
        id.token_seq = tokenize_identifier(id.surface, idx->vocab_);
      }
    };
    get_ids(idx->identifiers_.entities);
    get_ids(idx->identifiers_.relations);

    const auto& ents = idx->identifiers_.entities;
    const auto& rels = idx->identifiers_.relations;
    std::vector<Triple> triples(bin::get_count(in, 12));
    for (auto& t : triples) {
      const auto h = bin::get_u32(in);
      const auto r = bin::get_u32(in);
      const auto tl = bin::get_u32(in);
      if (h >= ents.size() || tl >= ents.size() || r >= rels.size()) {
        throw FormatError(name, 0, "triple references unknown subject");
      }
      t = {{ents[h].subject_key}, {rels[r].subject_key}, {ents[tl].subject_key}};
    }
    idx->graph_ = KnowledgeGraph::build(triples);
    if (idx->graph_.num_entities() != ents.size() ||
        idx->graph_.num_relations() != rels.size()) {
      throw FormatError(name, 0, "identifier table does not match triples");
    }
    for (EntityIndex e = 0; e < ents.size(); ++e) {
      if (idx->graph_.entity_key(e) != ents[e].subject_key) {
        throw FormatError(name, 0, "entity table out of order");
      }
    }
    for (RelationIndex r = 0; r < rels.size(); ++r) {
      if (idx->graph_.relation_key(r) != rels[r].subject_key) {
        throw FormatError(name, 0, "relation table out of order");
      }
    }

    idx->entity_trie_ = TokenTrie::deserialize(in);
    idx->relation_trie_ = TokenTrie::deserialize(in);
    auto check_trie = [&](const TokenTrie& trie,
                          const std::vector<Identifier>& ids) {
      if (trie.num_terminals() != ids.size()) {
        throw FormatError(name, 0, "trie size does not match identifiers");
      }
      for (std::uint32_t i = 0; i < ids.size(); ++i) {
        if (trie.complete_key(ids[i].token_seq) != i) {
          throw FormatError(name, 0, "trie does not spell " + ids[i].surface);
        }
      }
    };
    check_trie(idx->entity_trie_, ents);
    check_trie(idx->relation_trie_, rels);
    idx->build_derived();
    return idx;
  } catch (const FormatError& e) {
    if (e.file() == name) throw;
    throw FormatError(name, 0, e.what());
  }
}

}  // namespace kgcd
