// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors
//
// Human-readable identifiers for graph subjects, "[ label (type) ]", and the
// tokenization of identifiers and queries against a Vocabulary.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "kgcd/kg_store.hpp"
#include "kgcd/vocabulary.hpp"

namespace kgcd {

struct Identifier {
  std::string subject_key;
  std::string surface;
  std::vector<TokenId> token_seq;

  bool operator==(const Identifier&) const = default;
};

/// One line of a labels file.
struct LabelRecord {
  std::string key;
  std::string label;
  std::vector<std::string> types;
  std::string iri;

  bool operator==(const LabelRecord&) const = default;
};

/// Surface form for a subject. The label and types are lowercased, bracket
/// characters become parentheses and whitespace runs collapse to one space.
/// At most two types are used (the two smallest in lexicographic order). If
/// the plain form is already in `taken`, " | iri" is appended before the
/// closing bracket; throws InvalidArgument if that collides too.
std::string make_identifier_surface(std::string_view label,
                                    std::span<const std::string> types,
                                    std::string_view iri,
                                    const std::unordered_set<std::string>& taken);

/// make_identifier_surface() plus tokenization.
Identifier make_identifier(std::string key, std::string_view label,
                           std::span<const std::string> types,
                           std::string_view iri,
                           const std::unordered_set<std::string>& taken,
                           const Vocabulary& vocab);

/// "[ body ]" -> '[' , one token per body byte, ']'. Throws TokenizeError
/// naming the first byte without a token, or on a malformed surface.
std::vector<TokenId> tokenize_identifier(std::string_view surface,
                                         const Vocabulary& vocab);

/// Renders any token sequence as text. Keywords are separated by single
/// spaces, identifiers render as "[ body ]" and COUNT groups as
/// "COUNT(?var0)". End-of-sequence is not rendered.
std::string detokenize(std::span<const TokenId> tokens, const Vocabulary& vocab);

/// Inverse of detokenize() for query text: keywords, ?varK variables,
/// punctuation and bracketed identifiers. Throws TokenizeError.
std::vector<TokenId> tokenize_query(std::string_view text,
                                    const Vocabulary& vocab);

/// Tab-separated labels file: key, label, ';'-separated types, iri. The last
/// two fields are optional; a missing iri reads as the key.
std::vector<LabelRecord> read_labels_file(const std::filesystem::path& path);
std::vector<LabelRecord> parse_labels(std::string_view text,
                                      const std::string& source = "<memory>");
void write_labels_file(const std::filesystem::path& path,
                       std::span<const LabelRecord> labels);

/// Identifiers for every entity and relation of a graph, indexed like the
/// graph's key vectors.
struct IdentifierTable {
  std::vector<Identifier> entities;
  std::vector<Identifier> relations;
};

/// Subjects are processed in key order so the table is deterministic; surface
/// uniqueness is enforced separately among entities and among relations.
/// Subjects without a label record use their key with '_' read as a space.
/// Throws InvalidArgument when a label names a key absent from the graph.
IdentifierTable build_identifier_table(const KnowledgeGraph& graph,
                                       std::span<const LabelRecord> labels,
                                       const Vocabulary& vocab);

}  // namespace kgcd
