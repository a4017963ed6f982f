// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgcd/beam_search.hpp"
#include "kgcd/constraint_index.hpp"

namespace kgcd {

/// Owner of the active ConstraintIndex. Each decode takes one snapshot of the
/// index, so a swap never affects a decode already in progress and a decode
/// never sees two graphs.
class Engine {
 public:
  explicit Engine(std::shared_ptr<const ConstraintIndex> index);

  std::shared_ptr<const ConstraintIndex> snapshot() const;

  /// Replaces the active index. Throws InvalidArgument if its vocabulary
  /// differs from the current one.
  void swap_graph(std::shared_ptr<const ConstraintIndex> index);
  /// Builds an index for `graph` with the current vocabulary and swaps it in.
  /// Throws TokenizeError (engine unchanged) if some identifier cannot be
  /// spelled in that vocabulary.
  void swap_graph(KnowledgeGraph graph, std::span<const LabelRecord> labels);

  DecodeResult decode(std::string_view question, const Scorer& scorer,
                      const DecodeOptions& options) const;
  /// The whole batch runs against one snapshot.
  std::vector<BatchOutcome> batch_decode(std::span<const std::string> questions,
                                         const Scorer& scorer,
                                         const DecodeOptions& options,
                                         unsigned threads = 0) const;

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const ConstraintIndex> index_;
};

}  // namespace kgcd
