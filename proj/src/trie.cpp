// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/trie.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>

#include "binary_io.hpp"
#include "kgcd/error.hpp"

namespace kgcd {
namespace {

constexpr char kTrieMagic[8] = {'K', 'G', 'C', 'D', 'T', 'R', 'I', 'E'};
constexpr std::uint32_t kTrieVersion = 1;

struct Builder {
  std::span<const std::vector<TokenId>> seqs;
  std::span<const std::uint32_t> payloads;
  std::vector<std::uint32_t> order;
  std::vector<TokenTrie::Node>& nodes;
  std::vector<TokenTrie::Edge>& edges;
  std::vector<std::uint32_t>& leaves;

  const std::vector<TokenId>& seq(std::size_t i) const { return seqs[order[i]]; }

  // Sequences order[lo, hi) share their first `depth` tokens.
  void fill(TokenTrie::NodeId id, std::size_t lo, std::size_t hi,
            std::size_t depth) {
    nodes[id].leaf_begin = static_cast<std::uint32_t>(leaves.size());
    if (lo < hi && seq(lo).size() == depth) {
      nodes[id].payload = payloads[order[lo]];
      leaves.push_back(payloads[order[lo]]);
      ++lo;
    }
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t i = lo; i < hi;) {
      std::size_t j = i + 1;
      while (j < hi && seq(j)[depth] == seq(i)[depth]) ++j;
      groups.emplace_back(i, j);
      i = j;
    }
    nodes[id].first_edge = static_cast<std::uint32_t>(edges.size());
    nodes[id].num_edges = static_cast<std::uint32_t>(groups.size());
    for (const auto& g : groups) {
      auto child = static_cast<TokenTrie::NodeId>(nodes.size());
      nodes.emplace_back();
      edges.push_back({seq(g.first)[depth], child});
    }
    const std::uint32_t first = nodes[id].first_edge;
    for (std::size_t k = 0; k < groups.size(); ++k) {
      fill(edges[first + k].child, groups[k].first, groups[k].second, depth + 1);
    }
    nodes[id].leaf_end = static_cast<std::uint32_t>(leaves.size());
  }
};

}  // namespace

TokenTrie::TokenTrie() : nodes_(1) {}

TokenTrie TokenTrie::build(std::span<const std::vector<TokenId>> sequences) {
  std::vector<std::uint32_t> payloads(sequences.size());
  std::iota(payloads.begin(), payloads.end(), 0u);
  return build(sequences, payloads);
}

TokenTrie TokenTrie::build(std::span<const std::vector<TokenId>> sequences,
                           std::span<const std::uint32_t> payloads) {
  if (sequences.size() != payloads.size()) {
    throw InvalidArgument("trie build: sequence/payload count mismatch");
  }
  TokenTrie trie;
  std::vector<std::uint32_t> order(sequences.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return sequences[a] < sequences[b];
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (sequences[order[i]].empty()) {
      throw InvalidArgument("trie build: empty token sequence");
    }
    if (payloads[order[i]] == kNoPayload) {
      throw InvalidArgument("trie build: reserved payload value");
    }
    if (i > 0 && sequences[order[i]] == sequences[order[i - 1]]) {
      throw InvalidArgument("trie build: duplicate token sequence");
    }
  }
  Builder b{sequences, payloads, std::move(order), trie.nodes_, trie.edges_,
            trie.leaf_payloads_};
  b.fill(kRoot, 0, sequences.size(), 0);

  std::uint32_t max_payload = 0;
  for (auto p : payloads) max_payload = std::max(max_payload, p);
  trie.rank_of_payload_.assign(payloads.empty() ? 0 : max_payload + 1,
                               kNoPayload);
  for (std::uint32_t r = 0; r < trie.leaf_payloads_.size(); ++r) {
    trie.rank_of_payload_[trie.leaf_payloads_[r]] = r;
  }
  return trie;
}

std::optional<TokenTrie::NodeId> TokenTrie::child(NodeId id,
                                                  TokenId token) const {
  auto kids = children(id);
  auto it = std::lower_bound(
      kids.begin(), kids.end(), token,
      [](const Edge& e, TokenId t) { return e.token < t; });
  if (it == kids.end() || it->token != token) return std::nullopt;
  return it->child;
}

std::optional<TokenTrie::NodeId> TokenTrie::walk(
    std::span<const TokenId> prefix) const {
  NodeId cur = kRoot;
  for (TokenId t : prefix) {
    auto next = child(cur, t);
    if (!next) return std::nullopt;
    cur = *next;
  }
  return cur;
}

std::vector<TokenId> TokenTrie::allowed_continuations(
    std::span<const TokenId> prefix) const {
  std::vector<TokenId> out;
  if (auto n = walk(prefix)) {
    for (const auto& e : children(*n)) out.push_back(e.token);
  }
  return out;
}

std::optional<std::uint32_t> TokenTrie::complete_key(
    std::span<const TokenId> seq) const {
  auto n = walk(seq);
  if (!n || nodes_[*n].payload == kNoPayload) return std::nullopt;
  return nodes_[*n].payload;
}

std::optional<std::uint32_t> TokenTrie::leaf_rank(std::uint32_t payload) const {
  if (payload >= rank_of_payload_.size() ||
      rank_of_payload_[payload] == kNoPayload) {
    return std::nullopt;
  }
  return rank_of_payload_[payload];
}

void TokenTrie::serialize(std::ostream& out) const {
  std::uint32_t max_token = 0;
  for (const auto& e : edges_) max_token = std::max(max_token, e.token);
  const std::uint32_t width = max_token <= 0xffffu ? 2 : 4;

  out.write(kTrieMagic, sizeof(kTrieMagic));
  bin::put_u32(out, kTrieVersion);
  bin::put_u32(out, width);
  bin::put_u64(out, nodes_.size());
  for (const auto& n : nodes_) {
    bin::put_u32(out, n.first_edge);
    bin::put_u32(out, n.num_edges);
    bin::put_u32(out, n.payload);
    bin::put_u32(out, n.leaf_begin);
    bin::put_u32(out, n.leaf_end);
  }
  bin::put_u64(out, edges_.size());
  for (const auto& e : edges_) {
    if (width == 2) {
      bin::put_u16(out, static_cast<std::uint16_t>(e.token));
    } else {
      bin::put_u32(out, e.token);
    }
    bin::put_u32(out, e.child);
  }
  bin::put_u64(out, leaf_payloads_.size());
  for (auto p : leaf_payloads_) bin::put_u32(out, p);
  if (!out) throw IoError("failed writing trie");
}

TokenTrie TokenTrie::deserialize(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kTrieMagic, sizeof(magic)) != 0) {
    throw FormatError("trie", 0, "bad magic");
  }
  const auto version = bin::get_u32(in);
  if (version != kTrieVersion) {
    throw FormatError("trie", 0, "unsupported version " + std::to_string(version));
  }
  const auto width = bin::get_u32(in);
  if (width != 2 && width != 4) {
    throw FormatError("trie", 0, "unsupported token width");
  }
  TokenTrie trie;
  trie.nodes_.resize(bin::get_count(in, 20));
  for (auto& n : trie.nodes_) {
    n.first_edge = bin::get_u32(in);
    n.num_edges = bin::get_u32(in);
    n.payload = bin::get_u32(in);
    n.leaf_begin = bin::get_u32(in);
    n.leaf_end = bin::get_u32(in);
  }
  trie.edges_.resize(bin::get_count(in, width + 4));
  for (auto& e : trie.edges_) {
    e.token = width == 2 ? bin::get_u16(in) : bin::get_u32(in);
    e.child = bin::get_u32(in);
  }
  trie.leaf_payloads_.resize(bin::get_count(in, 4));
  for (auto& p : trie.leaf_payloads_) p = bin::get_u32(in);

  if (trie.nodes_.empty()) throw FormatError("trie", 0, "no root node");
  for (const auto& n : trie.nodes_) {
    if (std::uint64_t{n.first_edge} + n.num_edges > trie.edges_.size() ||
        n.leaf_begin > n.leaf_end || n.leaf_end > trie.leaf_payloads_.size()) {
      throw FormatError("trie", 0, "corrupt node table");
    }
  }
  for (const auto& e : trie.edges_) {
    if (e.child == kRoot || e.child >= trie.nodes_.size()) {
      throw FormatError("trie", 0, "corrupt edge table");
    }
  }
  std::uint32_t max_payload = 0;
  for (auto p : trie.leaf_payloads_) {
    if (p == kNoPayload) throw FormatError("trie", 0, "corrupt payload");
    max_payload = std::max(max_payload, p);
  }
  trie.rank_of_payload_.assign(
      trie.leaf_payloads_.empty() ? 0 : max_payload + 1, kNoPayload);
  for (std::uint32_t r = 0; r < trie.leaf_payloads_.size(); ++r) {
    trie.rank_of_payload_[trie.leaf_payloads_[r]] = r;
  }
  return trie;
}

}  // namespace kgcd
