// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/vocabulary.hpp"

#include "kgcd/error.hpp"

namespace kgcd {

const std::vector<std::string>& reserved_token_texts() {
  static const std::vector<std::string> kReserved = [] {
    std::vector<std::string> v = {"</s>", "}",   "]",        ".",
                                  "[",    "{",   "(",        ")",
                                  "SELECT", "ASK", "DISTINCT", "COUNT",
                                  "WHERE"};
    for (int k = 0; k < kMaxVariables; ++k) {
      v.push_back("?var" + std::to_string(k));
    }
    return v;
  }();
  return kReserved;
}

namespace {

std::vector<std::string> make_tokens(bool high_bytes) {
  std::vector<std::string> tokens = reserved_token_texts();
  for (int c = 0x20; c < 0x7f; ++c) {
    std::string s(1, static_cast<char>(c));
    bool taken = false;
    for (const auto& r : reserved_token_texts()) taken = taken || r == s;
    if (!taken) tokens.push_back(s);
  }
  if (high_bytes) {
    for (int c = 0x80; c <= 0xff; ++c) {
      tokens.emplace_back(1, static_cast<char>(c));
    }
  }
  return tokens;
}

}  // namespace

Vocabulary Vocabulary::standard() { return Vocabulary(make_tokens(true)); }

Vocabulary Vocabulary::ascii() { return Vocabulary(make_tokens(false)); }

Vocabulary::Vocabulary(std::vector<std::string> tokens)
    : tokens_(std::move(tokens)) {
  byte_tokens_.fill(-1);
  for (TokenId i = 0; i < tokens_.size(); ++i) {
    const auto& t = tokens_[i];
    if (t.empty()) throw InvalidArgument("empty token text");
    if (!lookup_.emplace(t, i).second) {
      throw InvalidArgument("duplicate token text: " + t);
    }
    if (t.size() == 1) {
      byte_tokens_[static_cast<unsigned char>(t[0])] = static_cast<std::int32_t>(i);
    }
  }
  auto need = [&](const std::string& text) {
    auto it = lookup_.find(text);
    if (it == lookup_.end()) {
      throw InvalidArgument("vocabulary lacks reserved token " + text);
    }
    return it->second;
  };
  reserved_.end_of_sequence = need("</s>");
  reserved_.close_brace = need("}");
  reserved_.dot = need(".");
  reserved_.close_bracket = need("]");
  reserved_.open_bracket = need("[");
  reserved_.open_brace = need("{");
  reserved_.open_paren = need("(");
  reserved_.close_paren = need(")");
  reserved_.select = need("SELECT");
  reserved_.ask = need("ASK");
  reserved_.distinct = need("DISTINCT");
  reserved_.count = need("COUNT");
  reserved_.where = need("WHERE");
  for (int k = 0; k < kMaxVariables; ++k) {
    reserved_.variables[k] = need("?var" + std::to_string(k));
  }
}

std::optional<TokenId> Vocabulary::find(std::string_view text) const {
  auto it = lookup_.find(std::string(text));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::id(std::string_view text) const {
  if (auto v = find(text)) return *v;
  throw TokenizeError("unknown token: " + std::string(text));
}

std::optional<int> Vocabulary::variable_index(TokenId id) const {
  for (int k = 0; k < kMaxVariables; ++k) {
    if (reserved_.variables[k] == id) return k;
  }
  return std::nullopt;
}

}  // namespace kgcd
