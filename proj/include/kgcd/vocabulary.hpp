// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgcd {

using TokenId = std::uint32_t;

inline constexpr int kMaxVariables = 10;

/// Token set of the engine.
///
/// Query keywords, punctuation and the variables ?var0..?var9 are single
/// reserved tokens. Identifier bodies are spelled one byte per token; a
/// single-character reserved token (".", "(", ...) doubles as the byte token
/// for that character. Token ids are dense and the reserved block comes first,
/// ordered so that closing tokens have the smallest ids.
class Vocabulary {
 public:
  struct Reserved {
    TokenId end_of_sequence;
    TokenId close_brace;
    TokenId dot;
    TokenId close_bracket;
    TokenId open_bracket;
    TokenId open_brace;
    TokenId open_paren;
    TokenId close_paren;
    TokenId select;
    TokenId ask;
    TokenId distinct;
    TokenId count;
    TokenId where;
    std::array<TokenId, kMaxVariables> variables;
  };

  /// Reserved tokens, printable ASCII and the bytes 0x80-0xFF (so that any
  /// UTF-8 text without control characters is representable).
  static Vocabulary standard();
  /// Reserved tokens and printable ASCII only.
  static Vocabulary ascii();

  /// Builds a vocabulary from explicit token texts. Every reserved token must
  /// be present exactly once. Throws InvalidArgument otherwise.
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::string& text(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::optional<TokenId> find(std::string_view text) const;
  /// Like find() but throws TokenizeError for unknown text.
  TokenId id(std::string_view text) const;

  /// Token spelling a single byte inside an identifier body.
  std::optional<TokenId> byte_token(unsigned char byte) const {
    auto v = byte_tokens_[byte];
    if (v < 0) return std::nullopt;
    return static_cast<TokenId>(v);
  }

  const Reserved& reserved() const { return reserved_; }
  TokenId variable(int k) const { return reserved_.variables.at(k); }
  /// Variable number for ?varK tokens, nullopt for anything else.
  std::optional<int> variable_index(TokenId id) const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> lookup_;
  std::array<std::int32_t, 256> byte_tokens_{};
  Reserved reserved_{};
};

/// Reserved token spellings in id order.
const std::vector<std::string>& reserved_token_texts();

}  // namespace kgcd
