// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/engine.hpp"

#include "kgcd/error.hpp"

namespace kgcd {

Engine::Engine(std::shared_ptr<const ConstraintIndex> index)
    : index_(std::move(index)) {
  if (!index_) throw InvalidArgument("engine: null index");
}

std::shared_ptr<const ConstraintIndex> Engine::snapshot() const {
  std::lock_guard lock(mu_);
  return index_;
}

void Engine::swap_graph(std::shared_ptr<const ConstraintIndex> index) {
  if (!index) throw InvalidArgument("swap_graph: null index");
  std::lock_guard lock(mu_);
  if (!(index->vocab() == index_->vocab())) {
    throw InvalidArgument("swap_graph: index uses a different vocabulary");
  }
  index_ = std::move(index);
}

void Engine::swap_graph(KnowledgeGraph graph,
                        std::span<const LabelRecord> labels) {
  auto vocab = snapshot()->vocab();
  swap_graph(ConstraintIndex::build(std::move(graph), labels, std::move(vocab)));
}

DecodeResult Engine::decode(std::string_view question, const Scorer& scorer,
                            const DecodeOptions& options) const {
  auto idx = snapshot();
  return kgcd::decode(*idx, question, scorer, options);
}

std::vector<BatchOutcome> Engine::batch_decode(
    std::span<const std::string> questions, const Scorer& scorer,
    const DecodeOptions& options, unsigned threads) const {
  auto idx = snapshot();
  return kgcd::batch_decode(*idx, questions, scorer, options, threads);
}

}  // namespace kgcd
