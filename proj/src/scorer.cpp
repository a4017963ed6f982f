// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "kgcd/error.hpp"
#include "kgcd/identifiers.hpp"

namespace kgcd {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

class UniformScorer final : public Scorer {
 public:
  explicit UniformScorer(std::size_t v) : v_(v) {
    if (v == 0) throw InvalidArgument("uniform scorer: empty vocabulary");
  }
  std::size_t vocab_size() const override { return v_; }
  bool nonpositive() const override { return true; }
  void score_step(std::string_view, std::span<const TokenId>,
                  std::span<double> out) const override {
    if (out.size() != v_) throw InvalidArgument("score buffer size mismatch");
    std::fill(out.begin(), out.end(), -std::log(static_cast<double>(v_)));
  }

 private:
  std::size_t v_;
};

class NoisyOracleScorer final : public Scorer {
 public:
  NoisyOracleScorer(const Vocabulary& vocab,
                    const std::unordered_map<std::string, std::string>& gold,
                    double epsilon, std::uint64_t seed)
      : v_(vocab.size()),
        eos_(vocab.reserved().end_of_sequence),
        epsilon_(epsilon),
        seed_(seed) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
      throw InvalidArgument("noisy oracle: epsilon must be in [0, 1]");
    }
    for (const auto& [q, text] : gold) gold_.emplace(q, tokenize_query(text, vocab));
  }

  std::size_t vocab_size() const override { return v_; }
  bool nonpositive() const override { return true; }

  void score_step(std::string_view question, std::span<const TokenId> emitted,
                  std::span<double> out) const override {
    if (out.size() != v_) throw InvalidArgument("score buffer size mismatch");
    const double floor = epsilon_ / static_cast<double>(v_);
    auto it = gold_.find(std::string(question));
    if (it == gold_.end()) {
      std::fill(out.begin(), out.end(), -std::log(static_cast<double>(v_)));
      return;
    }
    const auto& g = it->second;
    const TokenId target = emitted.size() < g.size() ? g[emitted.size()] : eos_;

    std::uint64_t h = splitmix64(seed_ ^ fnv1a(question));
    for (TokenId t : emitted) h = splitmix64(h ^ t);
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    const bool confused = u < epsilon_ && v_ > 1;

    std::vector<double> p(v_, floor);
    if (confused) {
      auto d = static_cast<TokenId>(splitmix64(h) % (v_ - 1));
      if (d >= target) ++d;
      p[d] += 0.6 * (1.0 - epsilon_);
      p[target] += 0.4 * (1.0 - epsilon_);
    } else {
      p[target] += 1.0 - epsilon_;
    }
    for (std::size_t i = 0; i < v_; ++i) out[i] = std::log(std::max(p[i], 1e-12));
  }

 private:
  std::size_t v_;
  TokenId eos_;
  double epsilon_;
  std::uint64_t seed_;
  std::unordered_map<std::string, std::vector<TokenId>> gold_;
};

}  // namespace

std::vector<double> Scorer::score_step(std::string_view question,
                                       std::span<const TokenId> emitted) const {
  std::vector<double> out(vocab_size());
  score_step(question, emitted, out);
  return out;
}

std::shared_ptr<const Scorer> make_uniform_scorer(std::size_t vocab_size,
                                                  std::uint64_t /*seed*/) {
  return std::make_shared<UniformScorer>(vocab_size);
}

std::shared_ptr<const Scorer> make_noisy_oracle_scorer(
    const Vocabulary& vocab,
    const std::unordered_map<std::string, std::string>& gold, double epsilon,
    std::uint64_t seed) {
  return std::make_shared<NoisyOracleScorer>(vocab, gold, epsilon, seed);
}

std::optional<ScorerSpec> parse_scorer_spec(std::string_view text) {
  if (text == "uniform") return ScorerSpec{};
  constexpr std::string_view kPrefix = "noisy-oracle:";
  if (text.substr(0, kPrefix.size()) != kPrefix) return std::nullopt;
  const std::string num(text.substr(kPrefix.size()));
  if (num.empty()) return std::nullopt;
  char* end = nullptr;
  const double eps = std::strtod(num.c_str(), &end);
  if (end != num.c_str() + num.size() || !(eps >= 0.0 && eps <= 1.0)) {
    return std::nullopt;
  }
  return ScorerSpec{ScorerSpec::Kind::NoisyOracle, eps};
}

std::string to_string(const ScorerSpec& spec) {
  if (spec.kind == ScorerSpec::Kind::Uniform) return "uniform";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "noisy-oracle:%g", spec.epsilon);
  return buf;
}

}  // namespace kgcd
