// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/kg_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "kgcd/error.hpp"

namespace kgcd {

KnowledgeGraph KnowledgeGraph::build(std::span<const Triple> triples) {
  KnowledgeGraph g;
  for (const auto& t : triples) {
    if (t.head.value.empty() || t.relation.value.empty() ||
        t.tail.value.empty()) {
      throw InvalidArgument("triple with an empty component");
    }
    g.entities_.push_back(t.head.value);
    g.entities_.push_back(t.tail.value);
    g.relations_.push_back(t.relation.value);
  }
  auto sort_unique = [](std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  sort_unique(g.entities_);
  sort_unique(g.relations_);

  g.entity_lookup_.reserve(g.entities_.size());
  for (EntityIndex i = 0; i < g.entities_.size(); ++i) {
    g.entity_lookup_.emplace(g.entities_[i], i);
  }
  g.relation_lookup_.reserve(g.relations_.size());
  for (RelationIndex i = 0; i < g.relations_.size(); ++i) {
    g.relation_lookup_.emplace(g.relations_[i], i);
  }

  g.triples_.reserve(triples.size());
  for (const auto& t : triples) {
    g.triples_.push_back({g.entity_lookup_.at(t.head.value),
                          g.relation_lookup_.at(t.relation.value),
                          g.entity_lookup_.at(t.tail.value)});
  }
  std::sort(g.triples_.begin(), g.triples_.end());
  g.triples_.erase(std::unique(g.triples_.begin(), g.triples_.end()),
                   g.triples_.end());

  const std::size_t ne = g.entities_.size();
  const std::size_t nr = g.relations_.size();
  g.head_offsets_.assign(ne + 1, 0);
  for (const auto& t : g.triples_) ++g.head_offsets_[t.head + 1];
  for (std::size_t i = 0; i < ne; ++i) {
    g.head_offsets_[i + 1] += g.head_offsets_[i];
  }

  g.by_relation_ = g.triples_;
  std::sort(g.by_relation_.begin(), g.by_relation_.end(),
            [](const IndexedTriple& a, const IndexedTriple& b) {
              return std::tie(a.relation, a.head, a.tail) <
                     std::tie(b.relation, b.head, b.tail);
            });
  g.relation_offsets_.assign(nr + 1, 0);
  for (const auto& t : g.by_relation_) ++g.relation_offsets_[t.relation + 1];
  for (std::size_t i = 0; i < nr; ++i) {
    g.relation_offsets_[i + 1] += g.relation_offsets_[i];
  }

  g.out_relations_.assign(ne, {});
  g.relation_tails_.assign(nr, {});
  for (const auto& t : g.triples_) {
    auto& out = g.out_relations_[t.head];
    if (out.empty() || out.back() != t.relation) out.push_back(t.relation);
    g.relation_tails_[t.relation].push_back(t.tail);
  }
  for (auto& tails : g.relation_tails_) {
    std::sort(tails.begin(), tails.end());
    tails.erase(std::unique(tails.begin(), tails.end()), tails.end());
  }
  return g;
}

std::optional<EntityIndex> KnowledgeGraph::find_entity(
    std::string_view key) const {
  auto it = entity_lookup_.find(std::string(key));
  if (it == entity_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationIndex> KnowledgeGraph::find_relation(
    std::string_view key) const {
  auto it = relation_lookup_.find(std::string(key));
  if (it == relation_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<RelationId> KnowledgeGraph::outgoing_relations(
    const EntityId& e) const {
  std::vector<RelationId> out;
  if (auto idx = find_entity(e.value)) {
    for (RelationIndex r : outgoing(*idx)) out.push_back({relations_[r]});
  }
  return out;
}

std::vector<EntityId> KnowledgeGraph::tail_entities(const RelationId& r) const {
  std::vector<EntityId> out;
  if (auto idx = find_relation(r.value)) {
    for (EntityIndex t : tails(*idx)) out.push_back({entities_[t]});
  }
  return out;
}

bool KnowledgeGraph::contains_triple(const EntityId& h, const RelationId& r,
                                     const EntityId& t) const {
  auto hi = find_entity(h.value);
  auto ri = find_relation(r.value);
  auto ti = find_entity(t.value);
  return hi && ri && ti && contains(*hi, *ri, *ti);
}

bool KnowledgeGraph::contains(EntityIndex h, RelationIndex r,
                              EntityIndex t) const {
  if (h >= entities_.size()) return false;
  auto range = triples_with_head(h);
  return std::binary_search(range.begin(), range.end(), IndexedTriple{h, r, t});
}

std::vector<EntityIndex> KnowledgeGraph::pair_tails(EntityIndex h,
                                                    RelationIndex r) const {
  std::vector<EntityIndex> out;
  if (h >= entities_.size()) return out;
  auto range = triples_with_head(h);
  auto lo = std::lower_bound(range.begin(), range.end(), IndexedTriple{h, r, 0});
  for (auto it = lo; it != range.end() && it->relation == r; ++it) {
    out.push_back(it->tail);
  }
  return out;
}

std::span<const IndexedTriple> KnowledgeGraph::triples_with_head(
    EntityIndex h) const {
  if (h >= entities_.size()) return {};
  return std::span<const IndexedTriple>(triples_).subspan(
      head_offsets_[h], head_offsets_[h + 1] - head_offsets_[h]);
}

std::span<const IndexedTriple> KnowledgeGraph::triples_with_relation(
    RelationIndex r) const {
  if (r >= relations_.size()) return {};
  return std::span<const IndexedTriple>(by_relation_)
      .subspan(relation_offsets_[r],
               relation_offsets_[r + 1] - relation_offsets_[r]);
}

std::vector<Triple> KnowledgeGraph::to_triples() const {
  std::vector<Triple> out;
  out.reserve(triples_.size());
  for (const auto& t : triples_) {
    out.push_back({{entities_[t.head]}, {relations_[t.relation]},
                   {entities_[t.tail]}});
  }
  return out;
}

std::vector<Triple> parse_triples(std::string_view text,
                                  const std::string& source) {
  std::vector<Triple> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    std::string_view fields[3];
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      std::size_t tab = line.find('\t', start);
      if (i < 2 && tab == std::string_view::npos) {
        throw FormatError(source, line_no, "expected 3 tab-separated fields");
      }
      if (i == 2 && tab != std::string_view::npos) {
        throw FormatError(source, line_no, "more than 3 fields");
      }
      fields[i] = line.substr(start, i < 2 ? tab - start : std::string_view::npos);
      start = tab + 1;
    }
    for (const auto& f : fields) {
      if (f.empty()) throw FormatError(source, line_no, "empty field");
    }
    out.push_back({{std::string(fields[0])},
                   {std::string(fields[1])},
                   {std::string(fields[2])}});
  }
  return out;
}

std::vector<Triple> read_triples_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open triples file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_triples(buf.str(), path.string());
}

void write_triples_file(const std::filesystem::path& path,
                        std::span<const Triple> triples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write triples file: " + path.string());
  for (const auto& t : triples) {
    out << t.head.value << '\t' << t.relation.value << '\t' << t.tail.value
        << '\n';
  }
}

}  // namespace kgcd
