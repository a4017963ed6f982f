// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors
//
// Token scorers standing in for a language model: score_step() returns one
// log-probability per vocabulary token for the next position.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgcd/vocabulary.hpp"

namespace kgcd {

class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::size_t vocab_size() const = 0;

  /// Writes vocab_size() finite scores into `out`. Must be safe to call
  /// concurrently.
  virtual void score_step(std::string_view question,
                          std::span<const TokenId> emitted,
                          std::span<double> out) const = 0;

  /// True when every score is <= 0 (log-probabilities). Beam search only
  /// stops early under this guarantee.
  virtual bool nonpositive() const { return false; }

  std::vector<double> score_step(std::string_view question,
                                 std::span<const TokenId> emitted) const;
};

/// log(1 / V) for every token.
std::shared_ptr<const Scorer> make_uniform_scorer(std::size_t vocab_size,
                                                  std::uint64_t seed = 0);

/// Scorer that knows the gold query of each question.
///
/// At position i the target is gold[i] (end-of-sequence past the end). A
/// step is "confused" with probability epsilon, decided by a hash of the seed,
/// the question and the prefix. An unconfused step puts 1 - epsilon on the
/// target; a confused step splits 1 - epsilon as 0.6 on one distractor token
/// and 0.4 on the target. Both spread epsilon uniformly over the vocabulary.
/// Questions without a gold query score uniformly.
///
/// `gold` maps question -> query text; throws TokenizeError for text outside
/// the vocabulary and InvalidArgument for epsilon outside [0, 1].
std::shared_ptr<const Scorer> make_noisy_oracle_scorer(
    const Vocabulary& vocab,
    const std::unordered_map<std::string, std::string>& gold, double epsilon,
    std::uint64_t seed);

struct ScorerSpec {
  enum class Kind : std::uint8_t { Uniform, NoisyOracle };
  Kind kind = Kind::Uniform;
  double epsilon = 0.0;
};

/// "uniform" or "noisy-oracle:EPS".
std::optional<ScorerSpec> parse_scorer_spec(std::string_view text);
std::string to_string(const ScorerSpec& spec);

}  // namespace kgcd
