// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors
//
// Deterministic synthetic graphs and question sets with exact ground truth.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kgcd/eval.hpp"
#include "kgcd/identifiers.hpp"
#include "kgcd/kg_store.hpp"

namespace kgcd {

/// Relative weights of the question templates.
struct TemplateMix {
  double one_hop = 1.0;  // [h] [r] ?var0
  double two_hop = 0.0;  // [h] [r1] ?var1 . ?var1 [r2] ?var0
  double count = 0.0;    // COUNT(?var0) over [h] [r] ?var0
  double ask = 0.0;      // ASK { [h] [r] [t] }
};

struct FixtureSpec {
  std::size_t entities = 20;
  std::size_t relations = 4;
  /// Target triple count is round(entities * density), raised if needed so
  /// that every entity and relation occurs in some triple.
  double density = 2.0;
  TemplateMix mix;
  /// Upper bound; fewer are produced when the templates run out of distinct
  /// questions.
  std::size_t questions = 50;
  std::string label_alphabet = "abcdefghijklmnopqrstuvwxyz";
  /// Labels are 1..label_length characters long.
  std::size_t label_length = 6;
  std::uint64_t seed = 1;
};

struct Fixture {
  std::vector<Triple> triples;
  std::vector<LabelRecord> labels;
  std::vector<DatasetItem> dataset;
};

/// Throws InvalidArgument for an unusable spec, including a template with
/// positive weight for which the graph has no instance. Every gold query is
/// checked at generation time to parse, pass the connectivity checks and
/// execute to its recorded answers.
Fixture generate_fixture(const FixtureSpec& spec);

/// The Michael Bay graph: Michael_Bay directs Transformers and Pearl_Harbor,
/// both are nominated for Academy_Awards, and only Ehren_Kruger has a write
/// edge.
Fixture figure1_fixture();

struct EvolutionSpec {
  FixtureSpec base;
  /// New entities N0.. with one outgoing edge each (a 1-hop question each).
  std::size_t new_entities = 5;
  /// New edges (h, r, t) on existing heads with r not yet leaving h (a COUNT
  /// question each).
  std::size_t new_edges = 5;
};

struct EvolutionPair {
  Fixture t0;
  std::vector<Triple> t1_triples;
  std::vector<LabelRecord> t1_labels;
  /// Questions whose gold query is inexecutable or empty on t0 and answers
  /// correctly on t1 (checked at generation time).
  std::vector<DatasetItem> delta;
};

EvolutionPair kb_evolution_pair(const EvolutionSpec& spec);

/// Writes triples.tsv, labels.tsv and dataset.tsv into `dir`.
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

}  // namespace kgcd
