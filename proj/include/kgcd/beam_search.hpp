// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgcd/constraint_index.hpp"
#include "kgcd/grammar.hpp"
#include "kgcd/mask.hpp"
#include "kgcd/scorer.hpp"

namespace kgcd {

struct DecodeOptions {
  MaskOptions mask;
  int beam_size = 10;
  int max_len = 128;
  GrammarConfig grammar;
  /// Stop once no live hypothesis can overtake the beam_size-th finished one.
  /// Only used with a scorer whose scores are all <= 0; the ranked output is
  /// the same either way, but the pool of finished sequences can be smaller.
  bool early_stop = true;
  /// Keep every finished sequence in DecodeResult::pool.
  bool keep_pool = false;
};

struct RankedQuery {
  std::vector<TokenId> tokens;  // includes end-of-sequence if emitted
  std::string text;
  double logp = 0.0;

  bool operator==(const RankedQuery&) const = default;
};

struct DecodeDiagnostics {
  int steps = 0;
  /// Hypotheses dropped because no token was allowed (or every allowed token
  /// scored -inf).
  std::size_t dead = 0;
  /// Hypotheses dropped because they could no longer finish within max_len.
  std::size_t unfinished = 0;
  std::size_t finished = 0;

  bool operator==(const DecodeDiagnostics&) const = default;
};

struct DecodeResult {
  /// At most beam_size entries, by logp descending then token sequence.
  std::vector<RankedQuery> ranked;
  DecodeDiagnostics diagnostics;
  /// Every finished sequence, same order, if DecodeOptions::keep_pool.
  std::vector<RankedQuery> pool;

  bool operator==(const DecodeResult&) const = default;
};

/// Beam search over `scorer` with masks from `options.mask`. Hypotheses are
/// ranked by summed masked log-probability with no length normalization;
/// equal scores are ordered by token sequence. Finished hypotheses leave the
/// beam and do not take slots, and prefixes that cannot finish within max_len
/// are dropped before they take one. Throws InvalidArgument for a non-positive beam
/// or max_len, a scorer/vocabulary size mismatch or an empty initial mask.
DecodeResult decode(const ConstraintIndex& index, std::string_view question,
                    const Scorer& scorer, const DecodeOptions& options);

struct BatchOutcome {
  std::optional<DecodeResult> result;
  std::string error;  // set iff !result
};

/// decode() for every question, on up to `threads` worker threads (0 = one
/// per hardware thread). Element i is identical to decode(questions[i]).
/// Errors are reported per question.
std::vector<BatchOutcome> batch_decode(const ConstraintIndex& index,
                                       std::span<const std::string> questions,
                                       const Scorer& scorer,
                                       const DecodeOptions& options,
                                       unsigned threads = 0);

}  // namespace kgcd
