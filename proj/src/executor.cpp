// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/executor.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>

#include "kgcd/error.hpp"
#include "kgcd/identifiers.hpp"

namespace kgcd {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  QueryAst parse() {
    QueryAst ast;
    if (keyword("SELECT")) {
      ast.form = QueryForm::Select;
      ast.distinct = keyword("DISTINCT");
      if (keyword("COUNT")) {
        ast.count = true;
        expect('(');
        ast.projection = variable();
        expect(')');
      } else {
        ast.projection = variable();
      }
      if (!keyword("WHERE")) fail("expected WHERE");
    } else if (keyword("ASK")) {
      ast.form = QueryForm::Ask;
    } else {
      fail("expected SELECT or ASK");
    }
    expect('{');
    skip_ws();
    if (peek() == '}') fail("empty pattern block");
    while (true) {
      TriplePattern p;
      p.head = term();
      p.relation = term();
      p.tail = term();
      ast.patterns.push_back(std::move(p));
      skip_ws();
      const bool dot = peek() == '.';
      if (dot) {
        ++pos_;
        skip_ws();
      }
      if (peek() == '}') break;
      if (!dot) fail("expected '.' or '}'");
    }
    ++pos_;
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");

    if (ast.form == QueryForm::Select) {
      const bool used = std::any_of(
          ast.patterns.begin(), ast.patterns.end(), [&](const TriplePattern& p) {
            for (const Term* t : {&p.head, &p.relation, &p.tail}) {
              if (t->kind == Term::Kind::Variable && t->text == ast.projection) {
                return true;
              }
            }
            return false;
          });
      if (!used) {
        throw QueryParseError(0, "projected variable ?" + ast.projection +
                                     " does not occur in any pattern");
      }
    }
    return ast;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw QueryParseError(pos_, what);
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }

  bool keyword(std::string_view kw) {
    skip_ws();
    if (s_.substr(pos_, kw.size()) != kw) return false;
    const std::size_t end = pos_ + kw.size();
    if (end < s_.size() && is_name_char(s_[end])) return false;
    pos_ = end;
    return true;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string variable() {
    skip_ws();
    if (peek() != '?') fail("expected variable");
    const std::size_t start = ++pos_;
    while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
    if (pos_ == start) fail("empty variable name");
    return std::string(s_.substr(start, pos_ - start));
  }

  Term term() {
    skip_ws();
    const char c = peek();
    if (c == '?') return {Term::Kind::Variable, variable()};
    if (c == '[') {
      const std::size_t close = s_.find(']', pos_);
      if (close == std::string_view::npos) fail("unterminated identifier");
      std::string_view body = s_.substr(pos_ + 1, close - pos_ - 1);
      while (!body.empty() && is_space(body.front())) body.remove_prefix(1);
      while (!body.empty() && is_space(body.back())) body.remove_suffix(1);
      if (body.empty()) fail("empty identifier");
      pos_ = close + 1;
      return {Term::Kind::Identifier, "[ " + std::string(body) + " ]"};
    }
    if (c == '<') {
      const std::size_t close = s_.find('>', pos_);
      if (close == std::string_view::npos) fail("unterminated IRI");
      std::string key(s_.substr(pos_ + 1, close - pos_ - 1));
      if (key.empty()) fail("empty IRI");
      pos_ = close + 1;
      return {Term::Kind::Iri, std::move(key)};
    }
    fail("expected a term");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

// A bound value: an entity or a relation index.
struct Value {
  bool relation = false;
  std::uint32_t id = 0;
  bool operator==(const Value&) const = default;
};

// One pattern position after resolution.
struct Slot {
  bool is_var = false;
  std::size_t var = 0;
  Value value;
};

struct Resolved {
  std::vector<std::array<Slot, 3>> patterns;
  std::vector<std::string> var_names;
  bool all_known = true;
};

std::optional<Value> resolve_term(const Term& t, bool relation_position,
                                  const ConstraintIndex& index) {
  if (relation_position) {
    std::optional<RelationIndex> r =
        t.kind == Term::Kind::Identifier ? index.relation_by_surface(t.text)
                                         : index.graph().find_relation(t.text);
    if (!r) return std::nullopt;
    return Value{true, *r};
  }
  std::optional<EntityIndex> e = t.kind == Term::Kind::Identifier
                                     ? index.entity_by_surface(t.text)
                                     : index.graph().find_entity(t.text);
  if (!e) return std::nullopt;
  return Value{false, *e};
}

Resolved resolve(const QueryAst& ast, const ConstraintIndex& index) {
  Resolved r;
  std::map<std::string, std::size_t> vars;
  for (const auto& p : ast.patterns) {
    std::array<Slot, 3> slots;
    const Term* terms[3] = {&p.head, &p.relation, &p.tail};
    for (int k = 0; k < 3; ++k) {
      const Term& t = *terms[k];
      if (t.kind == Term::Kind::Variable) {
        auto [it, inserted] = vars.emplace(t.text, r.var_names.size());
        if (inserted) r.var_names.push_back(t.text);
        slots[k].is_var = true;
        slots[k].var = it->second;
      } else if (auto v = resolve_term(t, k == 1, index)) {
        slots[k].value = *v;
      } else {
        r.all_known = false;
      }
    }
    r.patterns.push_back(slots);
  }
  return r;
}

class Matcher {
 public:
  Matcher(const Resolved& q, const KnowledgeGraph& g,
          std::optional<std::size_t> projection)
      : q_(q), g_(g), projection_(projection), binding_(q.var_names.size()) {}

  void run() { search(0); }

  bool any = false;
  std::vector<Value> projected;

 private:
  // Binds slot to value; returns false on conflict. Records whether it bound.
  bool unify(const Slot& s, Value v, std::vector<std::size_t>& bound) {
    if (!s.is_var) return s.value == v;
    auto& b = binding_[s.var];
    if (b) return *b == v;
    b = v;
    bound.push_back(s.var);
    return true;
  }

  std::optional<Value> current(const Slot& s) const {
    if (!s.is_var) return s.value;
    return binding_[s.var];
  }

  void search(std::size_t i) {
    if (i == q_.patterns.size()) {
      any = true;
      if (projection_) projected.push_back(*binding_[*projection_]);
      return;
    }
    const auto& p = q_.patterns[i];
    const auto h = current(p[0]);
    const auto r = current(p[1]);
    std::span<const IndexedTriple> cand;
    if (h && !h->relation) {
      cand = g_.triples_with_head(h->id);
    } else if (r && r->relation) {
      cand = g_.triples_with_relation(r->id);
    } else if (!h && !r) {
      cand = g_.triples();
    } else {
      return;  // a relation bound in entity position or vice versa
    }
    for (const auto& t : cand) {
      std::vector<std::size_t> bound;
      if (unify(p[0], {false, t.head}, bound) &&
          unify(p[1], {true, t.relation}, bound) &&
          unify(p[2], {false, t.tail}, bound)) {
        search(i + 1);
      }
      for (auto v : bound) binding_[v].reset();
    }
  }

  const Resolved& q_;
  const KnowledgeGraph& g_;
  std::optional<std::size_t> projection_;
  std::vector<std::optional<Value>> binding_;
};

std::string value_key(const Value& v, const KnowledgeGraph& g) {
  return v.relation ? g.relation_key(v.id) : g.entity_key(v.id);
}

}  // namespace

QueryAst parse_query(std::string_view text) { return Parser(text).parse(); }

QueryAst parse_query(std::span<const TokenId> tokens, const Vocabulary& vocab) {
  return parse_query(detokenize(tokens, vocab));
}

bool ResultSet::empty() const {
  switch (kind) {
    case Kind::Boolean: return false;
    case Kind::Entities: return values.empty();
    case Kind::Count: return count == 0;
  }
  return true;
}

std::vector<std::string> ResultSet::answers() const {
  switch (kind) {
    case Kind::Boolean: return {boolean ? "true" : "false"};
    case Kind::Entities: return values;
    case Kind::Count: return {std::to_string(count)};
  }
  return {};
}

ResultSet execute(const QueryAst& ast, const ConstraintIndex& index) {
  ResultSet out;
  out.kind = ast.form == QueryForm::Ask ? ResultSet::Kind::Boolean
             : ast.count                ? ResultSet::Kind::Count
                                        : ResultSet::Kind::Entities;
  const Resolved q = resolve(ast, index);
  if (!q.all_known) return out;

  std::optional<std::size_t> projection;
  if (ast.form == QueryForm::Select) {
    auto it = std::find(q.var_names.begin(), q.var_names.end(), ast.projection);
    if (it == q.var_names.end()) {
      throw InvalidArgument("projected variable does not occur in a pattern");
    }
    projection = static_cast<std::size_t>(it - q.var_names.begin());
  }
  Matcher m(q, index.graph(), projection);
  m.run();

  const KnowledgeGraph& g = index.graph();
  switch (out.kind) {
    case ResultSet::Kind::Boolean:
      out.boolean = m.any;
      break;
    case ResultSet::Kind::Count: {
      std::set<std::string> keys;
      for (const auto& v : m.projected) keys.insert(value_key(v, g));
      out.count = keys.size();
      break;
    }
    case ResultSet::Kind::Entities:
      for (const auto& v : m.projected) out.values.push_back(value_key(v, g));
      std::sort(out.values.begin(), out.values.end());
      if (ast.distinct) {
        out.values.erase(std::unique(out.values.begin(), out.values.end()),
                         out.values.end());
      }
      break;
  }
  return out;
}

QueryCheck check_query(std::string_view text, const ConstraintIndex& index) {
  QueryCheck c;
  QueryAst ast;
  try {
    ast = parse_query(text);
  } catch (const QueryParseError& e) {
    c.error = e.what();
    return c;
  }
  c.parsed = true;
  const KnowledgeGraph& g = index.graph();
  c.resolved = true;
  c.connected = true;
  for (const auto& p : ast.patterns) {
    std::optional<Value> h, r, t;
    const Term* terms[3] = {&p.head, &p.relation, &p.tail};
    std::optional<Value>* outs[3] = {&h, &r, &t};
    for (int k = 0; k < 3; ++k) {
      if (terms[k]->kind == Term::Kind::Variable) continue;
      *outs[k] = resolve_term(*terms[k], k == 1, index);
      if (!*outs[k]) {
        c.resolved = false;
        if (c.error.empty()) c.error = "unknown subject " + terms[k]->text;
      }
    }
    if (h && r) {
      auto out = g.outgoing(h->id);
      if (!std::binary_search(out.begin(), out.end(), r->id)) {
        c.connected = false;
        if (c.error.empty()) {
          c.error = "relation " + g.relation_key(r->id) +
                    " does not leave " + g.entity_key(h->id);
        }
      }
    }
    if (r && t) {
      auto tails = g.tails(r->id);
      if (!std::binary_search(tails.begin(), tails.end(), t->id)) {
        c.connected = false;
        if (c.error.empty()) {
          c.error = g.entity_key(t->id) + " is not a tail of " +
                    g.relation_key(r->id);
        }
      }
    }
  }
  return c;
}

std::optional<Answer> answer(std::span<const RankedQuery> ranked,
                             const ConstraintIndex& index) {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    QueryAst ast;
    try {
      ast = parse_query(ranked[i].text);
    } catch (const QueryParseError&) {
      continue;
    }
    ResultSet rs = execute(ast, index);
    if (rs.empty()) continue;
    return Answer{std::move(rs), i + 1, ranked[i].text};
  }
  return std::nullopt;
}

std::string expand_iris(std::string_view query, const ConstraintIndex& index) {
  std::string out;
  std::size_t i = 0;
  // Position of the identifier within its pattern decides entity vs relation.
  int position = 0;
  bool in_patterns = false;
  while (i < query.size()) {
    const char c = query[i];
    if (c == '{') in_patterns = true;
    if (c == '[') {
      const std::size_t close = query.find(']', i);
      if (close == std::string_view::npos) {
        out.append(query.substr(i));
        break;
      }
      std::string_view body = query.substr(i + 1, close - i - 1);
      while (!body.empty() && is_space(body.front())) body.remove_prefix(1);
      while (!body.empty() && is_space(body.back())) body.remove_suffix(1);
      const std::string surface = "[ " + std::string(body) + " ]";
      std::optional<std::string> key;
      if (position == 1) {
        if (auto r = index.relation_by_surface(surface)) {
          key = index.graph().relation_key(*r);
        }
      } else if (auto e = index.entity_by_surface(surface)) {
        key = index.graph().entity_key(*e);
      }
      out += key ? "<" + *key + ">" : std::string(query.substr(i, close - i + 1));
      i = close + 1;
      if (in_patterns) position = (position + 1) % 3;
      continue;
    }
    if (in_patterns && c == '?') {
      std::size_t j = i + 1;
      while (j < query.size() && is_name_char(query[j])) ++j;
      out.append(query.substr(i, j - i));
      i = j;
      position = (position + 1) % 3;
      continue;
    }
    if (c == '.') position = 0;
    out.push_back(c);
    ++i;
  }
  return out;
}

}  // namespace kgcd
