// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/identifiers.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "kgcd/error.hpp"

namespace kgcd {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

std::string normalize(std::string_view text, bool lowercase) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (c == '[') c = '(';
    if (c == ']') c = ')';
    if (lowercase && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string describe_byte(unsigned char b) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "0x%02x", b);
  if (b >= 0x20 && b < 0x7f) return "'" + std::string(1, static_cast<char>(b)) + "' (" + buf + ")";
  return buf;
}

bool is_keyword(std::string_view w) {
  return w == "SELECT" || w == "ASK" || w == "DISTINCT" || w == "COUNT" ||
         w == "WHERE";
}

}  // namespace

std::string make_identifier_surface(
    std::string_view label, std::span<const std::string> types,
    std::string_view iri, const std::unordered_set<std::string>& taken) {
  std::string body = normalize(label, true);
  if (body.empty()) throw InvalidArgument("identifier label is empty");

  std::vector<std::string> kinds;
  for (const auto& t : types) {
    std::string n = normalize(t, true);
    if (!n.empty()) kinds.push_back(std::move(n));
  }
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
  if (kinds.size() > 2) kinds.resize(2);
  if (!kinds.empty()) {
    body += " (";
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (i) body += ", ";
      body += kinds[i];
    }
    body += ")";
  }

  std::string surface = "[ " + body + " ]";
  if (!taken.contains(surface)) return surface;

  std::string suffix = normalize(iri, false);
  if (suffix.empty()) {
    throw InvalidArgument("identifier " + surface +
                          " collides and no IRI is available");
  }
  surface = "[ " + body + " | " + suffix + " ]";
  if (taken.contains(surface)) {
    throw InvalidArgument("identifier " + surface +
                          " collides even with its IRI suffix");
  }
  return surface;
}

Identifier make_identifier(std::string key, std::string_view label,
                           std::span<const std::string> types,
                           std::string_view iri,
                           const std::unordered_set<std::string>& taken,
                           const Vocabulary& vocab) {
  Identifier id;
  id.subject_key = std::move(key);
  id.surface = make_identifier_surface(label, types, iri, taken);
  id.token_seq = tokenize_identifier(id.surface, vocab);
  return id;
}

std::vector<TokenId> tokenize_identifier(std::string_view surface,
                                         const Vocabulary& vocab) {
  if (surface.size() < 5 || !surface.starts_with("[ ") ||
      !surface.ends_with(" ]")) {
    throw TokenizeError("malformed identifier surface: " + std::string(surface));
  }
  std::string_view body = surface.substr(2, surface.size() - 4);
  if (body.front() == ' ' || body.back() == ' ') {
    throw TokenizeError("identifier body has padding: " + std::string(surface));
  }
  std::vector<TokenId> out;
  out.reserve(body.size() + 2);
  out.push_back(vocab.reserved().open_bracket);
  for (std::size_t i = 0; i < body.size(); ++i) {
    auto b = static_cast<unsigned char>(body[i]);
    if (b == '[' || b == ']') {
      throw TokenizeError("bracket inside identifier body: " +
                          std::string(surface));
    }
    auto tok = vocab.byte_token(b);
    if (!tok) {
      throw TokenizeError("character " + describe_byte(b) + " at offset " +
                          std::to_string(i + 2) + " of " +
                          std::string(surface) + " is not in the vocabulary");
    }
    out.push_back(*tok);
  }
  out.push_back(vocab.reserved().close_bracket);
  return out;
}

std::string detokenize(std::span<const TokenId> tokens, const Vocabulary& vocab) {
  const auto& rv = vocab.reserved();
  std::string out;
  bool in_ident = false;
  bool glue_next = false;
  std::optional<TokenId> prev;
  for (TokenId t : tokens) {
    if (t == rv.end_of_sequence) continue;
    if (in_ident) {
      if (t == rv.close_bracket) {
        out += " ]";
        in_ident = false;
        prev = t;
      } else {
        out += vocab.text(t);
      }
      continue;
    }
    bool glue = glue_next || t == rv.close_paren ||
                (t == rv.open_paren && prev == rv.count);
    if (!out.empty() && !glue) out.push_back(' ');
    glue_next = t == rv.open_paren;
    if (t == rv.open_bracket) {
      out += "[ ";
      in_ident = true;
    } else {
      out += vocab.text(t);
    }
    prev = t;
  }
  return out;
}

std::vector<TokenId> tokenize_query(std::string_view text,
                                    const Vocabulary& vocab) {
  const auto& rv = vocab.reserved();
  std::vector<TokenId> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto fail = [&](const std::string& what) -> TokenizeError {
    return TokenizeError("offset " + std::to_string(i) + ": " + what);
  };
  while (i < n) {
    char c = text[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (c == '[') {
      std::size_t close = text.find(']', i);
      if (close == std::string_view::npos) throw fail("unterminated identifier");
      auto ids = tokenize_identifier(text.substr(i, close - i + 1), vocab);
      out.insert(out.end(), ids.begin(), ids.end());
      i = close + 1;
    } else if (c == '?') {
      std::size_t j = i + 1;
      while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                       text[j] == '_')) {
        ++j;
      }
      auto tok = vocab.find(text.substr(i, j - i));
      if (!tok || !vocab.variable_index(*tok)) {
        throw fail("unsupported variable " + std::string(text.substr(i, j - i)));
      }
      out.push_back(*tok);
      i = j;
    } else if (c == '{' || c == '}' || c == '.' || c == '(' || c == ')') {
      out.push_back(c == '{'   ? rv.open_brace
                    : c == '}' ? rv.close_brace
                    : c == '.' ? rv.dot
                    : c == '(' ? rv.open_paren
                               : rv.close_paren);
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < n && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
      std::string_view word = text.substr(i, j - i);
      if (!is_keyword(word)) throw fail("unknown keyword " + std::string(word));
      out.push_back(vocab.id(word));
      i = j;
    } else {
      throw fail("unexpected character " + describe_byte(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

std::vector<LabelRecord> parse_labels(std::string_view text,
                                      const std::string& source) {
  std::vector<LabelRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string_view::npos
                                              ? std::string_view::npos
                                              : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 2 || fields.size() > 4) {
      throw FormatError(source, line_no, "expected key, label, types, iri");
    }
    LabelRecord rec;
    rec.key = std::string(fields[0]);
    rec.label = std::string(fields[1]);
    if (rec.key.empty()) throw FormatError(source, line_no, "empty key");
    if (rec.label.empty()) throw FormatError(source, line_no, "empty label");
    if (fields.size() > 2) {
      std::string_view types = fields[2];
      std::size_t s = 0;
      while (s <= types.size()) {
        std::size_t semi = types.find(';', s);
        if (semi == std::string_view::npos) semi = types.size();
        std::string_view t = types.substr(s, semi - s);
        while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
        while (!t.empty() && t.back() == ' ') t.remove_suffix(1);
        if (!t.empty()) rec.types.emplace_back(t);
        s = semi + 1;
      }
    }
    rec.iri = fields.size() > 3 && !fields[3].empty() ? std::string(fields[3])
                                                      : rec.key;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<LabelRecord> read_labels_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open labels file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_labels(buf.str(), path.string());
}

void write_labels_file(const std::filesystem::path& path,
                       std::span<const LabelRecord> labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write labels file: " + path.string());
  for (const auto& rec : labels) {
    out << rec.key << '\t' << rec.label << '\t';
    for (std::size_t i = 0; i < rec.types.size(); ++i) {
      if (i) out << ';';
      out << rec.types[i];
    }
    out << '\t' << rec.iri << '\n';
  }
}

IdentifierTable build_identifier_table(const KnowledgeGraph& graph,
                                       std::span<const LabelRecord> labels,
                                       const Vocabulary& vocab) {
  std::unordered_map<std::string, const LabelRecord*> by_key;
  for (const auto& rec : labels) {
    if (!graph.find_entity(rec.key) && !graph.find_relation(rec.key)) {
      throw InvalidArgument("labels reference a key absent from the graph: " +
                            rec.key);
    }
    if (!by_key.emplace(rec.key, &rec).second) {
      throw InvalidArgument("duplicate label record for key: " + rec.key);
    }
  }

  auto build = [&](const std::vector<std::string>& keys) {
    std::vector<Identifier> ids;
    ids.reserve(keys.size());
    std::unordered_set<std::string> taken;
    for (const auto& key : keys) {
      auto it = by_key.find(key);
      Identifier id;
      if (it != by_key.end()) {
        id = make_identifier(key, it->second->label, it->second->types,
                             it->second->iri, taken, vocab);
      } else {
        std::string label = key;
        std::replace(label.begin(), label.end(), '_', ' ');
        id = make_identifier(key, label, {}, key, taken, vocab);
      }
      taken.insert(id.surface);
      ids.push_back(std::move(id));
    }
    return ids;
  };

  IdentifierTable table;
  table.entities = build(graph.entity_keys());
  table.relations = build(graph.relation_keys());
  return table;
}

}  // namespace kgcd
