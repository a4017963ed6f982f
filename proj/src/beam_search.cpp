// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/beam_search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "kgcd/error.hpp"
#include "kgcd/identifiers.hpp"

namespace kgcd {
namespace {

struct Hypothesis {
  DecoderState state;
  double logp = 0.0;
};

struct Candidate {
  double logp;
  std::size_t parent;
  TokenId token;
};

bool ranked_before(const RankedQuery& a, const RankedQuery& b) {
  if (a.logp != b.logp) return a.logp > b.logp;
  return a.tokens < b.tokens;
}

}  // namespace

DecodeResult decode(const ConstraintIndex& index, std::string_view question,
                    const Scorer& scorer, const DecodeOptions& options) {
  if (options.beam_size < 1) throw InvalidArgument("beam size must be >= 1");
  if (options.max_len < 1) throw InvalidArgument("max_len must be >= 1");
  const Vocabulary& vocab = index.vocab();
  if (scorer.vocab_size() != vocab.size()) {
    throw InvalidArgument("scorer covers " + std::to_string(scorer.vocab_size()) +
                          " tokens, vocabulary has " +
                          std::to_string(vocab.size()));
  }
  const Grammar grammar(index, options.grammar);
  const bool lenient = options.mask.mode == MaskMode::Unconstrained;
  const auto beam = static_cast<std::size_t>(options.beam_size);
  const bool can_stop_early = options.early_stop && scorer.nonpositive();

  DecodeResult result;
  std::vector<RankedQuery> pool;
  // Live hypotheses are kept in token-sequence order, so (parent, token)
  // order among equal scores is token-sequence order of the children.
  std::vector<Hypothesis> live{{grammar.initial_state(), 0.0}};
  if (allowed_tokens(grammar, live[0].state, options.mask).empty()) {
    throw InvalidArgument("initial mask is empty");
  }

  // No completion is longer than this, so shorter prefixes skip the check.
  std::size_t longest_completion = 10;
  for (const auto* ids : {&index.entity_identifiers(), &index.relation_identifiers()}) {
    std::size_t longest = 0;
    for (const auto& id : *ids) longest = std::max(longest, id.token_seq.size());
    longest_completion += longest;
  }
  const auto max_len = static_cast<std::size_t>(options.max_len);

  std::vector<double> scores(vocab.size());
  std::vector<Candidate> cands;
  for (int step = 0; step < options.max_len && !live.empty(); ++step) {
    result.diagnostics.steps = step + 1;
    cands.clear();
    for (std::size_t i = 0; i < live.size(); ++i) {
      const TokenMask mask = allowed_tokens(grammar, live[i].state, options.mask);
      bool any = false;
      if (!mask.empty()) {
        scorer.score_step(question, live[i].state.emitted, scores);
        mask.for_each([&](TokenId t) {
          const double lp = live[i].logp + scores[t];
          if (std::isnan(lp) || lp == -INFINITY) return;
          cands.push_back({lp, i, t});
          any = true;
        });
      }
      if (!any) ++result.diagnostics.dead;
    }
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) {
                if (a.logp != b.logp) return a.logp > b.logp;
                if (a.parent != b.parent) return a.parent < b.parent;
                return a.token < b.token;
              });

    std::vector<Hypothesis> next;
    for (const Candidate& c : cands) {
      if (next.size() == beam) break;
      const DecoderState& parent = live[c.parent].state;
      DecoderState st = lenient ? grammar.advance_lenient(parent, c.token)
                                : grammar.advance(parent, c.token);
      if (st.slot == SlotKind::End) {
        pool.push_back({st.emitted, detokenize(st.emitted, vocab), c.logp});
        continue;
      }
      if (st.emitted.size() + longest_completion > max_len) {
        // A prefix that cannot finish in time would only take a slot.
        const auto need = min_completion(grammar, st, options.mask);
        if (!need || st.emitted.size() + *need > max_len) {
          ++result.diagnostics.unfinished;
          continue;
        }
      }
      next.push_back({std::move(st), c.logp});
    }
    std::sort(next.begin(), next.end(),
              [](const Hypothesis& a, const Hypothesis& b) {
                return a.state.emitted < b.state.emitted;
              });
    live = std::move(next);

    if (can_stop_early && pool.size() >= beam && !live.empty()) {
      std::vector<double> best(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i) best[i] = pool[i].logp;
      std::nth_element(best.begin(), best.begin() + static_cast<long>(beam - 1),
                       best.end(), std::greater<>());
      const double threshold = best[beam - 1];
      double top_live = -INFINITY;
      for (const auto& h : live) top_live = std::max(top_live, h.logp);
      if (top_live < threshold) {
        live.clear();
        break;
      }
    }
  }

  result.diagnostics.unfinished += live.size();
  result.diagnostics.finished = pool.size();
  std::sort(pool.begin(), pool.end(), ranked_before);
  result.ranked.assign(pool.begin(),
                       pool.begin() + static_cast<long>(std::min(beam, pool.size())));
  if (options.keep_pool) result.pool = std::move(pool);
  return result;
}

std::vector<BatchOutcome> batch_decode(const ConstraintIndex& index,
                                       std::span<const std::string> questions,
                                       const Scorer& scorer,
                                       const DecodeOptions& options,
                                       unsigned threads) {
  std::vector<BatchOutcome> out(questions.size());
  if (questions.empty()) return out;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(questions.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < questions.size(); i = next++) {
      try {
        out[i].result = decode(index, questions[i], scorer, options);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  if (threads == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace kgcd
