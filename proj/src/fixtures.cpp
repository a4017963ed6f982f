// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "kgcd/constraint_index.hpp"
#include "kgcd/error.hpp"
#include "kgcd/executor.hpp"

namespace kgcd {
namespace {

// Only raw engine output is used (modulo / shifts), never std distributions,
// so fixtures are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

const std::vector<std::string>& type_pool() {
  static const std::vector<std::string> kTypes = {
      "person", "film", "award", "place", "work", "group"};
  return kTypes;
}

std::string random_word(Rng& rng, const std::string& alphabet,
                        std::size_t max_len) {
  const std::size_t len = 1 + rng.below(max_len);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w.push_back(alphabet[rng.below(alphabet.size())]);
  return w;
}

std::string body(const Identifier& id) {
  return id.surface.substr(2, id.surface.size() - 4);
}

// Re-renders query text in detokenized form.
std::string canonical(const std::string& text, const Vocabulary& vocab) {
  return detokenize(tokenize_query(text, vocab), vocab);
}

struct Question {
  std::string question;
  std::string gold;
  std::vector<std::string> answers;
};

std::string one_hop_query(const Identifier& h, const Identifier& r) {
  return "SELECT DISTINCT ?var0 WHERE { " + h.surface + " " + r.surface +
         " ?var0 . }";
}

std::string count_query(const Identifier& h, const Identifier& r) {
  return "SELECT DISTINCT COUNT(?var0) WHERE { " + h.surface + " " + r.surface +
         " ?var0 . }";
}

std::vector<std::string> keys_of(std::span<const EntityIndex> es,
                                 const KnowledgeGraph& g) {
  std::vector<std::string> out;
  for (auto e : es) out.push_back(g.entity_key(e));
  std::sort(out.begin(), out.end());
  return out;
}

void self_check(const Question& q, const ConstraintIndex& idx) {
  const auto check = check_query(q.gold, idx);
  if (!check.executable()) {
    throw Error("fixture self-check: gold query not executable: " + q.gold +
                " (" + check.error + ")");
  }
  auto answers = execute(parse_query(q.gold), idx).answers();
  auto expected = q.answers;
  std::sort(answers.begin(), answers.end());
  std::sort(expected.begin(), expected.end());
  if (answers != expected || answers.empty()) {
    throw Error("fixture self-check: answers differ for " + q.gold);
  }
}

std::vector<Triple> make_triples(const FixtureSpec& spec, Rng& rng) {
  const std::size_t n = spec.entities;
  const std::size_t nr = spec.relations;
  auto ekey = [](std::size_t i) { return EntityId{"E" + std::to_string(i)}; };
  auto rkey = [](std::size_t i) { return RelationId{"r" + std::to_string(i)}; };

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

  std::set<Triple> triples;
  // Cover every entity (pairwise) and every relation.
  const std::size_t pairs = (n + 1) / 2;
  const std::size_t cover = std::max(pairs, nr);
  for (std::size_t k = 0; k < cover; ++k) {
    std::size_t h, t;
    if (k < pairs) {
      h = perm[(2 * k) % n];
      t = perm[(2 * k + 1) % n];
    } else {
      h = rng.below(n);
      t = rng.below(n - 1);
      if (t >= h) ++t;
    }
    triples.insert(Triple{ekey(h), rkey(k % nr), ekey(t)});
  }
  const auto target = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.density)));
  const std::size_t capacity = n * (n - 1) * nr;
  for (std::size_t attempts = 0;
       triples.size() < std::min(target, capacity) && attempts < 100 * target;
       ++attempts) {
    const std::size_t h = rng.below(n);
    std::size_t t = rng.below(n - 1);
    if (t >= h) ++t;
    triples.insert(Triple{ekey(h), rkey(rng.below(nr)), ekey(t)});
  }
  return {triples.begin(), triples.end()};
}

std::vector<LabelRecord> make_labels(const KnowledgeGraph& g,
                                     const FixtureSpec& spec, Rng& rng) {
  std::vector<LabelRecord> labels;
  for (const auto& key : g.entity_keys()) {
    LabelRecord rec{key, random_word(rng, spec.label_alphabet, spec.label_length),
                    {}, "ex:" + key};
    const std::size_t ntypes = rng.below(3);
    for (std::size_t i = 0; i < ntypes; ++i) {
      const auto& t = type_pool()[rng.below(type_pool().size())];
      if (std::find(rec.types.begin(), rec.types.end(), t) == rec.types.end()) {
        rec.types.push_back(t);
      }
    }
    labels.push_back(std::move(rec));
  }
  for (const auto& key : g.relation_keys()) {
    labels.push_back(
        {key, random_word(rng, spec.label_alphabet, spec.label_length), {}, "ex:" + key});
  }
  return labels;
}

void check_spec(const FixtureSpec& spec) {
  if (spec.entities < 2) throw InvalidArgument("fixture needs at least 2 entities");
  if (spec.relations < 1) throw InvalidArgument("fixture needs at least 1 relation");
  if (!(spec.density > 0.0)) throw InvalidArgument("density must be positive");
  if (spec.label_alphabet.empty() || spec.label_length == 0) {
    throw InvalidArgument("empty label alphabet or length");
  }
  for (char c : spec.label_alphabet) {
    if (c == '[' || c == ']' || c == ' ' || static_cast<unsigned char>(c) < 0x20) {
      throw InvalidArgument("label alphabet contains a reserved character");
    }
  }
  const auto& m = spec.mix;
  if (m.one_hop < 0 || m.two_hop < 0 || m.count < 0 || m.ask < 0 ||
      m.one_hop + m.two_hop + m.count + m.ask <= 0) {
    throw InvalidArgument("template mix needs a positive weight");
  }
}

}  // namespace

Fixture generate_fixture(const FixtureSpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed);
  Fixture fx;
  fx.triples = make_triples(spec, rng);
  auto graph = KnowledgeGraph::build(fx.triples);
  fx.labels = make_labels(graph, spec, rng);
  const auto idx = ConstraintIndex::build(graph, fx.labels, Vocabulary::standard());
  const KnowledgeGraph& g = idx->graph();
  const auto& ents = idx->entity_identifiers();
  const auto& rels = idx->relation_identifiers();
  const Vocabulary& vocab = idx->vocab();

  // Candidate pools per template, in graph order.
  std::vector<Question> pools[4];
  for (EntityIndex h = 0; h < g.num_entities(); ++h) {
    for (RelationIndex r : g.outgoing(h)) {
      const auto tails = g.pair_tails(h, r);
      pools[0].push_back({"what is the " + body(rels[r]) + " of " + body(ents[h]) + "?",
                          canonical(one_hop_query(ents[h], rels[r]), vocab),
                          keys_of(tails, g)});
      pools[2].push_back(
          {"how many " + body(rels[r]) + " does " + body(ents[h]) + " have?",
           canonical(count_query(ents[h], rels[r]), vocab),
           {std::to_string(tails.size())}});
      for (EntityIndex t : tails) {
        pools[3].push_back({"is " + body(ents[t]) + " the " + body(rels[r]) +
                                " of " + body(ents[h]) + "?",
                            canonical("ASK { " + ents[h].surface + " " +
                                          rels[r].surface + " " +
                                          ents[t].surface + " . }",
                                      vocab),
                            {"true"}});
      }
      std::map<RelationIndex, std::set<EntityIndex>> second;
      for (EntityIndex mid : tails) {
        for (RelationIndex r2 : g.outgoing(mid)) {
          for (EntityIndex t : g.pair_tails(mid, r2)) second[r2].insert(t);
        }
      }
      for (const auto& [r2, ts] : second) {
        const std::vector<EntityIndex> tv(ts.begin(), ts.end());
        pools[1].push_back(
            {"what is the " + body(rels[r2]) + " of the " + body(rels[r]) +
                 " of " + body(ents[h]) + "?",
             canonical("SELECT DISTINCT ?var0 WHERE { " + ents[h].surface + " " +
                           rels[r].surface + " ?var1 . ?var1 " +
                           rels[r2].surface + " ?var0 . }",
                       vocab),
             keys_of(tv, g)});
      }
    }
  }

  const double weights[4] = {spec.mix.one_hop, spec.mix.two_hop, spec.mix.count,
                             spec.mix.ask};
  static const char* kNames[4] = {"1-hop", "2-hop", "count", "ask"};
  for (int k = 0; k < 4; ++k) {
    if (weights[k] > 0 && pools[k].empty()) {
      throw InvalidArgument(std::string("fixture: graph has no ") + kNames[k] +
                            " question");
    }
  }

  std::set<std::string> seen;
  double active[4];
  std::copy(std::begin(weights), std::end(weights), std::begin(active));
  while (fx.dataset.size() < spec.questions) {
    double total = 0;
    for (double w : active) total += w;
    if (total <= 0) break;
    double u = rng.unit() * total;
    int k = 0;
    int last = 0;
    for (; k < 4; ++k) {
      if (active[k] <= 0) continue;
      last = k;
      if (u < active[k]) break;
      u -= active[k];
    }
    if (k == 4) k = last;
    auto& pool = pools[k];
    if (pool.empty()) {
      active[k] = 0;
      continue;
    }
    const std::size_t pick = rng.below(pool.size());
    Question q = std::move(pool[pick]);
    pool[pick] = std::move(pool.back());
    pool.pop_back();
    if (!seen.insert(q.question).second) continue;
    self_check(q, *idx);
    fx.dataset.push_back({q.question, q.gold, q.answers});
  }
  return fx;
}

Fixture figure1_fixture() {
  Fixture fx;
  fx.triples = {
      {{"Michael_Bay"}, {"direct"}, {"Transformers"}},
      {{"Michael_Bay"}, {"direct"}, {"Pearl_Harbor"}},
      {{"Transformers"}, {"nominated_for"}, {"Academy_Awards"}},
      {{"Pearl_Harbor"}, {"nominated_for"}, {"Academy_Awards"}},
      {{"Ehren_Kruger"}, {"write"}, {"Transformers"}},
  };
  fx.labels = {
      {"Michael_Bay", "Michael Bay", {"director"}, "dbr:Michael_Bay"},
      {"Transformers", "Transformers", {"film"}, "dbr:Transformers"},
      {"Pearl_Harbor", "Pearl Harbor", {"film"}, "dbr:Pearl_Harbor"},
      {"Academy_Awards", "Academy Awards", {"award"}, "dbr:Academy_Awards"},
      {"Ehren_Kruger", "Ehren Kruger", {"writer"}, "dbr:Ehren_Kruger"},
  };
  fx.dataset = {
      {"what did michael bay direct?",
       "SELECT DISTINCT ?var0 WHERE { [ michael bay (director) ] [ direct ] ?var0 . }",
       {"Pearl_Harbor", "Transformers"}},
      {"which award were michael bay's movies nominated for?",
       "SELECT DISTINCT ?var0 WHERE { [ michael bay (director) ] [ direct ] ?var1 . "
       "?var1 [ nominated for ] ?var0 . }",
       {"Academy_Awards"}},
      {"how many movies did michael bay direct?",
       "SELECT DISTINCT COUNT(?var0) WHERE { [ michael bay (director) ] [ direct ] "
       "?var0 . }",
       {"2"}},
      {"was transformers nominated for the academy awards?",
       "ASK { [ transformers (film) ] [ nominated for ] [ academy awards (award) ] . }",
       {"true"}},
  };
  return fx;
}

EvolutionPair kb_evolution_pair(const EvolutionSpec& spec) {
  EvolutionPair out;
  out.t0 = generate_fixture(spec.base);
  const auto g0 = KnowledgeGraph::build(out.t0.triples);
  Rng rng(spec.base.seed ^ 0x5eed5eed5eedull);

  std::set<Triple> t1(out.t0.triples.begin(), out.t0.triples.end());
  out.t1_labels = out.t0.labels;
  const auto& ekeys = g0.entity_keys();
  const auto& rkeys = g0.relation_keys();

  std::vector<std::pair<std::string, std::string>> new_heads;  // (entity, relation)
  for (std::size_t i = 0; i < spec.new_entities; ++i) {
    const std::string key = "N" + std::to_string(i);
    const std::string& r = rkeys[rng.below(rkeys.size())];
    const std::string& t = ekeys[rng.below(ekeys.size())];
    t1.insert(Triple{{key}, {r}, {t}});
    out.t1_labels.push_back(
        {key, random_word(rng, spec.base.label_alphabet, spec.base.label_length),
         {}, "ex:" + key});
    new_heads.emplace_back(key, r);
  }

  // Existing (head, relation) pairs that t0 does not have.
  std::vector<std::pair<EntityIndex, RelationIndex>> missing;
  for (EntityIndex h = 0; h < g0.num_entities(); ++h) {
    auto out_r = g0.outgoing(h);
    for (RelationIndex r = 0; r < g0.num_relations(); ++r) {
      if (!std::binary_search(out_r.begin(), out_r.end(), r)) missing.emplace_back(h, r);
    }
  }
  if (spec.new_edges > missing.size()) {
    throw InvalidArgument("kb_evolution_pair: not enough missing (head, relation) pairs");
  }
  std::vector<std::pair<std::string, std::string>> new_pairs;
  for (std::size_t i = 0; i < spec.new_edges; ++i) {
    const std::size_t pick = rng.below(missing.size());
    auto [h, r] = missing[pick];
    missing[pick] = missing.back();
    missing.pop_back();
    std::size_t t = rng.below(ekeys.size() - 1);
    if (t >= h) ++t;
    t1.insert(Triple{{ekeys[h]}, {rkeys[r]}, {ekeys[t]}});
    new_pairs.emplace_back(ekeys[h], rkeys[r]);
  }
  out.t1_triples.assign(t1.begin(), t1.end());

  const auto idx0 = ConstraintIndex::build(g0, out.t0.labels, Vocabulary::standard());
  const auto idx1 = ConstraintIndex::build(KnowledgeGraph::build(out.t1_triples),
                                           out.t1_labels, Vocabulary::standard());
  const KnowledgeGraph& g1 = idx1->graph();
  const auto& ents = idx1->entity_identifiers();
  const auto& rels = idx1->relation_identifiers();
  const Vocabulary& vocab = idx1->vocab();

  auto emit = [&](Question q) {
    const auto c0 = check_query(q.gold, *idx0);
    if (c0.executable() && !execute(parse_query(q.gold), *idx0).empty()) {
      throw Error("kb_evolution_pair: delta question answerable on t0: " + q.gold);
    }
    self_check(q, *idx1);
    out.delta.push_back({q.question, q.gold, q.answers});
  };
  for (const auto& [hk, rk] : new_heads) {
    const EntityIndex h = *g1.find_entity(hk);
    const RelationIndex r = *g1.find_relation(rk);
    emit({"what is the " + body(rels[r]) + " of " + body(ents[h]) + "?",
          canonical(one_hop_query(ents[h], rels[r]), vocab),
          keys_of(g1.pair_tails(h, r), g1)});
  }
  for (const auto& [hk, rk] : new_pairs) {
    const EntityIndex h = *g1.find_entity(hk);
    const RelationIndex r = *g1.find_relation(rk);
    emit({"how many " + body(rels[r]) + " does " + body(ents[h]) + " have?",
          canonical(count_query(ents[h], rels[r]), vocab),
          {std::to_string(g1.pair_tails(h, r).size())}});
  }
  return out;
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_triples_file(dir / "triples.tsv", fixture.triples);
  write_labels_file(dir / "labels.tsv", fixture.labels);
  write_dataset_file(dir / "dataset.tsv", fixture.dataset);
}

}  // namespace kgcd
