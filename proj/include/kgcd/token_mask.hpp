// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "kgcd/vocabulary.hpp"

namespace kgcd {

/// Set of token ids over a fixed vocabulary size, stored as a bitset.
class TokenMask {
 public:
  TokenMask() = default;
  explicit TokenMask(std::size_t vocab_size)
      : size_(vocab_size), words_((vocab_size + 63) / 64, 0) {}

  static TokenMask all(std::size_t vocab_size) {
    TokenMask m(vocab_size);
    for (std::size_t i = 0; i < vocab_size; ++i) m.set(static_cast<TokenId>(i));
    return m;
  }

  std::size_t vocab_size() const { return size_; }

  void set(TokenId t) { words_[t >> 6] |= std::uint64_t{1} << (t & 63); }
  void reset(TokenId t) { words_[t >> 6] &= ~(std::uint64_t{1} << (t & 63)); }
  bool test(TokenId t) const {
    return t < size_ && ((words_[t >> 6] >> (t & 63)) & 1);
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool empty() const {
    for (auto w : words_) {
      if (w) return false;
    }
    return true;
  }

  /// Calls f(token) in increasing token order.
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        const int bit = std::countr_zero(w);
        f(static_cast<TokenId>(wi * 64 + static_cast<std::size_t>(bit)));
        w &= w - 1;
      }
    }
  }

  std::vector<TokenId> to_vector() const {
    std::vector<TokenId> out;
    for_each([&](TokenId t) { out.push_back(t); });
    return out;
  }

  /// True when every member of this mask is in `other`.
  bool subset_of(const TokenMask& other) const {
    if (other.words_.size() != words_.size()) return false;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & ~other.words_[i]) return false;
    }
    return true;
  }

  /// Packed form: token i is bit (i % 8) of byte (i / 8), LSB first.
  std::vector<std::uint8_t> pack() const {
    std::vector<std::uint8_t> out((size_ + 7) / 8, 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
    }
    return out;
  }

  std::span<const std::uint64_t> words() const { return words_; }

  bool operator==(const TokenMask&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace kgcd
