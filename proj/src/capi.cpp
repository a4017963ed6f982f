// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/kgcd.h"

#include <cstring>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "kgcd/constraint_index.hpp"
#include "kgcd/engine.hpp"
#include "kgcd/error.hpp"
#include "kgcd/eval.hpp"
#include "kgcd/executor.hpp"
#include "kgcd/fixtures.hpp"
#include "kgcd/grammar.hpp"
#include "kgcd/mask.hpp"

using json = nlohmann::json;

struct kgcd_index {
  std::shared_ptr<const kgcd::ConstraintIndex> index;
};

struct kgcd_engine {
  std::unique_ptr<kgcd::Engine> engine;
};

struct kgcd_result {
  struct Item {
    std::string json;
    std::string error;
    bool failed = false;
    std::vector<std::string> queries;
    std::vector<double> logps;
  };
  std::vector<Item> items;
};

struct kgcd_session {
  std::shared_ptr<const kgcd::ConstraintIndex> index;
  std::unique_ptr<kgcd::Grammar> grammar;
  bool strict_pairs = false;
  std::shared_mutex mu;  // guards the map, not the states
  std::unordered_map<std::uint64_t, std::shared_ptr<kgcd::DecoderState>> seqs;
};

namespace {

thread_local std::string g_last_error;

kgcd_status fail(kgcd_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

// Runs f, translating exceptions into status codes.
template <typename F>
kgcd_status guarded(F&& f) {
  try {
    return f();
  } catch (const kgcd::InvalidArgument& e) {
    return fail(KGCD_ERR_INVALID_ARGUMENT, e.what());
  } catch (const kgcd::IoError& e) {
    return fail(KGCD_ERR_IO, e.what());
  } catch (const kgcd::FormatError& e) {
    return fail(KGCD_ERR_FORMAT, e.what());
  } catch (const kgcd::TokenizeError& e) {
    return fail(KGCD_ERR_TOKENIZE, e.what());
  } catch (const kgcd::GrammarError& e) {
    return fail(KGCD_ERR_ILLEGAL_TOKEN, e.what());
  } catch (const kgcd::QueryParseError& e) {
    return fail(KGCD_ERR_QUERY_PARSE, e.what());
  } catch (const json::exception& e) {
    return fail(KGCD_ERR_INVALID_ARGUMENT, std::string("bad JSON: ") + e.what());
  } catch (const std::exception& e) {
    return fail(KGCD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(KGCD_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

kgcd::MaskMode to_mode(int mode) {
  switch (mode) {
    case KGCD_MODE_FULL: return kgcd::MaskMode::Full;
    case KGCD_MODE_NO_PRUNING: return kgcd::MaskMode::NoPruning;
    case KGCD_MODE_UNCONSTRAINED: return kgcd::MaskMode::Unconstrained;
    default: throw kgcd::InvalidArgument("unknown mode " + std::to_string(mode));
  }
}

kgcd::DecodeOptions decode_options(const kgcd_decode_options& o) {
  kgcd::DecodeOptions d;
  d.mask.mode = to_mode(o.mode);
  d.mask.strict_pairs = o.strict_pairs != 0;
  d.beam_size = o.beam_size;
  d.max_len = o.max_len;
  d.grammar.max_patterns = o.max_patterns;
  return d;
}

std::shared_ptr<const kgcd::Scorer> make_scorer(
    const kgcd_decode_options& o, const kgcd::Vocabulary& vocab,
    const std::vector<kgcd::DatasetItem>* gold_items) {
  const std::string text = o.scorer ? o.scorer : "uniform";
  auto spec = kgcd::parse_scorer_spec(text);
  if (!spec) throw kgcd::InvalidArgument("unknown scorer: " + text);
  if (spec->kind == kgcd::ScorerSpec::Kind::Uniform) {
    return kgcd::make_uniform_scorer(vocab.size(), o.seed);
  }
  std::vector<kgcd::DatasetItem> loaded;
  if (!gold_items) {
    if (!o.gold_path) {
      throw kgcd::InvalidArgument("noisy-oracle scorer needs gold queries");
    }
    loaded = kgcd::read_dataset_file(o.gold_path);
    gold_items = &loaded;
  }
  std::unordered_map<std::string, std::string> gold;
  for (const auto& it : *gold_items) gold.emplace(it.question, it.gold_query);
  return kgcd::make_noisy_oracle_scorer(vocab, gold, spec->epsilon, o.seed);
}

kgcd::FixtureSpec fixture_spec(const json& j) {
  kgcd::FixtureSpec s;
  s.entities = j.value("entities", s.entities);
  s.relations = j.value("relations", s.relations);
  s.density = j.value("density", s.density);
  s.questions = j.value("questions", s.questions);
  s.seed = j.value("seed", s.seed);
  s.label_alphabet = j.value("label_alphabet", s.label_alphabet);
  s.label_length = j.value("label_length", s.label_length);
  if (j.contains("mix")) {
    const json& m = j.at("mix");
    s.mix.one_hop = m.value("one_hop", 0.0);
    s.mix.two_hop = m.value("two_hop", 0.0);
    s.mix.count = m.value("count", 0.0);
    s.mix.ask = m.value("ask", 0.0);
  }
  return s;
}

json parse_spec(const char* spec_json) {
  if (!spec_json || !*spec_json) return json::object();
  json j = json::parse(spec_json);
  if (!j.is_object()) throw kgcd::InvalidArgument("fixture spec must be an object");
  return j;
}

kgcd_status need(const void* p, const char* what) {
  if (p) return KGCD_OK;
  return fail(KGCD_ERR_INVALID_ARGUMENT, std::string(what) + " is NULL");
}

std::shared_ptr<kgcd::DecoderState> find_seq(kgcd_session* s, std::uint64_t id) {
  std::shared_lock lock(s->mu);
  auto it = s->seqs.find(id);
  return it == s->seqs.end() ? nullptr : it->second;
}

}  // namespace

extern "C" {

const char* kgcd_version(void) { return "0.1.0"; }

const char* kgcd_last_error(void) { return g_last_error.c_str(); }

const char* kgcd_status_name(kgcd_status status) {
  switch (status) {
    case KGCD_OK: return "ok";
    case KGCD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case KGCD_ERR_IO: return "i/o error";
    case KGCD_ERR_FORMAT: return "format error";
    case KGCD_ERR_TOKENIZE: return "tokenize error";
    case KGCD_ERR_ILLEGAL_TOKEN: return "illegal token";
    case KGCD_ERR_QUERY_PARSE: return "query parse error";
    case KGCD_ERR_UNKNOWN_SEQUENCE: return "unknown sequence";
    case KGCD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void kgcd_string_free(char* s) { std::free(s); }

kgcd_status kgcd_index_build(const char* triples_path, const char* labels_path,
                             kgcd_index** out) {
  if (auto st = need(triples_path, "triples_path")) return st;
  if (auto st = need(out, "out")) return st;
  return guarded([&] {
    auto triples = kgcd::read_triples_file(triples_path);
    std::vector<kgcd::LabelRecord> labels;
    if (labels_path) labels = kgcd::read_labels_file(labels_path);
    auto idx = kgcd::ConstraintIndex::build(kgcd::KnowledgeGraph::build(triples),
                                            labels, kgcd::Vocabulary::standard());
    *out = new kgcd_index{std::move(idx)};
    return KGCD_OK;
  });
}

kgcd_status kgcd_index_load(const char* path, kgcd_index** out) {
  if (auto st = need(path, "path")) return st;
  if (auto st = need(out, "out")) return st;
  return guarded([&] {
    *out = new kgcd_index{kgcd::ConstraintIndex::load(path)};
    return KGCD_OK;
  });
}

kgcd_status kgcd_index_save(const kgcd_index* index, const char* path) {
  if (auto st = need(index, "index")) return st;
  if (auto st = need(path, "path")) return st;
  return guarded([&] {
    index->index->save(path);
    return KGCD_OK;
  });
}

void kgcd_index_free(kgcd_index* index) { delete index; }

kgcd_status kgcd_index_counts(const kgcd_index* index, size_t* entities,
                              size_t* relations, size_t* triples) {
  if (auto st = need(index, "index")) return st;
  const auto& g = index->index->graph();
  if (entities) *entities = g.num_entities();
  if (relations) *relations = g.num_relations();
  if (triples) *triples = g.num_triples();
  return KGCD_OK;
}

kgcd_status kgcd_generate_fixture(const char* spec_json, const char* out_dir) {
  if (auto st = need(out_dir, "out_dir")) return st;
  return guarded([&] {
    kgcd::write_fixture(kgcd::generate_fixture(fixture_spec(parse_spec(spec_json))),
                        out_dir);
    return KGCD_OK;
  });
}

kgcd_status kgcd_generate_evolution(const char* spec_json, const char* out_dir) {
  if (auto st = need(out_dir, "out_dir")) return st;
  return guarded([&] {
    const json j = parse_spec(spec_json);
    kgcd::EvolutionSpec spec;
    spec.base = fixture_spec(j);
    spec.new_entities = j.value("new_entities", spec.new_entities);
    spec.new_edges = j.value("new_edges", spec.new_edges);
    auto pair = kgcd::kb_evolution_pair(spec);
    const std::filesystem::path dir(out_dir);
    kgcd::write_fixture(pair.t0, dir / "t0");
    kgcd::Fixture t1{pair.t1_triples, pair.t1_labels, pair.delta};
    kgcd::write_fixture(t1, dir / "t1");
    kgcd::write_dataset_file(dir / "delta.tsv", pair.delta);
    return KGCD_OK;
  });
}

kgcd_status kgcd_generate_figure1(const char* out_dir) {
  if (auto st = need(out_dir, "out_dir")) return st;
  return guarded([&] {
    kgcd::write_fixture(kgcd::figure1_fixture(), out_dir);
    return KGCD_OK;
  });
}

void kgcd_decode_options_init(kgcd_decode_options* o) {
  if (!o) return;
  *o = kgcd_decode_options{};
  o->mode = KGCD_MODE_FULL;
  o->beam_size = 10;
  o->max_len = 128;
  o->max_patterns = 4;
  o->strict_pairs = 0;
  o->scorer = "uniform";
  o->seed = 0;
  o->gold_path = nullptr;
  o->expand_iris = 0;
  o->threads = 0;
}

kgcd_status kgcd_engine_new(const kgcd_index* index, kgcd_engine** out) {
  if (auto st = need(index, "index")) return st;
  if (auto st = need(out, "out")) return st;
  return guarded([&] {
    *out = new kgcd_engine{std::make_unique<kgcd::Engine>(index->index)};
    return KGCD_OK;
  });
}

void kgcd_engine_free(kgcd_engine* engine) { delete engine; }

kgcd_status kgcd_engine_swap(kgcd_engine* engine, const kgcd_index* index) {
  if (auto st = need(engine, "engine")) return st;
  if (auto st = need(index, "index")) return st;
  return guarded([&] {
    engine->engine->swap_graph(index->index);
    return KGCD_OK;
  });
}

kgcd_status kgcd_decode(kgcd_engine* engine, const kgcd_decode_options* options,
                        const char* const* questions, size_t count, int batch,
                        kgcd_result** out) {
  if (auto st = need(engine, "engine")) return st;
  if (auto st = need(options, "options")) return st;
  if (auto st = need(out, "out")) return st;
  if (count > 0 && !questions) return fail(KGCD_ERR_INVALID_ARGUMENT, "questions is NULL");
  return guarded([&] {
    const auto idx = engine->engine->snapshot();
    const auto opts = decode_options(*options);
    const auto scorer = make_scorer(*options, idx->vocab(), nullptr);

    std::vector<std::string> qs;
    for (size_t i = 0; i < count; ++i) {
      if (!questions[i]) throw kgcd::InvalidArgument("question is NULL");
      qs.emplace_back(questions[i]);
    }
    std::vector<kgcd::BatchOutcome> outcomes;
    if (batch) {
      outcomes = kgcd::batch_decode(*idx, qs, *scorer, opts, options->threads);
    } else {
      for (const auto& q : qs) {
        kgcd::BatchOutcome o;
        try {
          o.result = kgcd::decode(*idx, q, *scorer, opts);
        } catch (const std::exception& e) {
          o.error = e.what();
        }
        outcomes.push_back(std::move(o));
      }
    }

    auto result = std::make_unique<kgcd_result>();
    for (size_t i = 0; i < qs.size(); ++i) {
      kgcd_result::Item item;
      json j;
      j["question"] = qs[i];
      if (!outcomes[i].result) {
        item.failed = true;
        item.error = outcomes[i].error;
        j["ranked"] = json::array();
        j["answer"] = nullptr;
        j["diagnostics"] = nullptr;
        j["error"] = item.error;
      } else {
        const auto& r = *outcomes[i].result;
        auto render = [&](const std::string& q) {
          return options->expand_iris ? kgcd::expand_iris(q, *idx) : q;
        };
        json ranked = json::array();
        for (const auto& rq : r.ranked) {
          item.queries.push_back(render(rq.text));
          item.logps.push_back(rq.logp);
          ranked.push_back({{"query", item.queries.back()}, {"logp", rq.logp}});
        }
        j["ranked"] = std::move(ranked);
        if (auto ans = kgcd::answer(r.ranked, *idx)) {
          j["answer"] = {{"rank", ans->rank},
                         {"query", render(ans->query)},
                         {"values", ans->result.answers()}};
        } else {
          j["answer"] = nullptr;
        }
        j["diagnostics"] = {{"steps", r.diagnostics.steps},
                            {"dead", r.diagnostics.dead},
                            {"unfinished", r.diagnostics.unfinished},
                            {"finished", r.diagnostics.finished}};
        j["error"] = nullptr;
      }
      item.json = j.dump();
      result->items.push_back(std::move(item));
    }
    *out = result.release();
    return KGCD_OK;
  });
}

size_t kgcd_result_count(const kgcd_result* result) {
  return result ? result->items.size() : 0;
}

const char* kgcd_result_json(const kgcd_result* result, size_t i) {
  if (!result || i >= result->items.size()) return nullptr;
  return result->items[i].json.c_str();
}

const char* kgcd_result_error(const kgcd_result* result, size_t i) {
  if (!result || i >= result->items.size() || !result->items[i].failed) {
    return nullptr;
  }
  return result->items[i].error.c_str();
}

size_t kgcd_result_ranked_count(const kgcd_result* result, size_t i) {
  if (!result || i >= result->items.size()) return 0;
  return result->items[i].queries.size();
}

const char* kgcd_result_query(const kgcd_result* result, size_t i, size_t rank) {
  if (!result || i >= result->items.size() ||
      rank >= result->items[i].queries.size()) {
    return nullptr;
  }
  return result->items[i].queries[rank].c_str();
}

double kgcd_result_logp(const kgcd_result* result, size_t i, size_t rank) {
  if (!result || i >= result->items.size() ||
      rank >= result->items[i].logps.size()) {
    return 0.0;
  }
  return result->items[i].logps[rank];
}

void kgcd_result_free(kgcd_result* result) { delete result; }

kgcd_status kgcd_eval(kgcd_engine* engine, const kgcd_decode_options* options,
                      const char* dataset_path, const int* modes,
                      size_t mode_count, const int* beams, size_t beam_count,
                      int timing_repetitions, char** csv_out, char** svg_out) {
  if (auto st = need(engine, "engine")) return st;
  if (auto st = need(options, "options")) return st;
  if (auto st = need(dataset_path, "dataset_path")) return st;
  if (auto st = need(csv_out, "csv_out")) return st;
  return guarded([&] {
    const auto idx = engine->engine->snapshot();
    const auto dataset = kgcd::read_dataset_file(dataset_path);
    const auto scorer = make_scorer(*options, idx->vocab(), &dataset);
    kgcd::SweepConfig cfg;
    cfg.base = decode_options(*options);
    cfg.timing_repetitions = timing_repetitions;
    if (mode_count > 0) {
      if (!modes) throw kgcd::InvalidArgument("modes is NULL");
      cfg.modes.clear();
      for (size_t i = 0; i < mode_count; ++i) cfg.modes.push_back(to_mode(modes[i]));
    }
    if (beam_count > 0) {
      if (!beams) throw kgcd::InvalidArgument("beams is NULL");
      cfg.beams.assign(beams, beams + beam_count);
    }
    const auto rows = kgcd::beam_sweep(*idx, dataset, *scorer, cfg);
    char* csv = dup_string(kgcd::sweep_to_csv(rows));
    if (svg_out) {
      try {
        *svg_out = dup_string(kgcd::sweep_to_svg(rows));
      } catch (...) {
        std::free(csv);
        throw;
      }
    }
    *csv_out = csv;
    return KGCD_OK;
  });
}

kgcd_status kgcd_swap_demo(const kgcd_index* t0, const kgcd_index* t1,
                           const char* delta_path,
                           const kgcd_decode_options* options,
                           char** report_out, size_t* answered_t0,
                           size_t* answered_t1) {
  if (auto st = need(t0, "t0")) return st;
  if (auto st = need(t1, "t1")) return st;
  if (auto st = need(delta_path, "delta_path")) return st;
  if (auto st = need(options, "options")) return st;
  if (auto st = need(report_out, "report_out")) return st;
  return guarded([&] {
    const auto delta = kgcd::read_dataset_file(delta_path);
    kgcd::Engine engine(t0->index);
    const auto scorer = make_scorer(*options, t0->index->vocab(), &delta);
    const auto rows = kgcd::swap_demo(engine, t1->index, delta, *scorer,
                                      decode_options(*options));
    size_t before = 0, after = 0;
    for (const auto& r : rows) {
      before += r.answered_before;
      after += r.answered_after;
    }
    if (answered_t0) *answered_t0 = before;
    if (answered_t1) *answered_t1 = after;
    *report_out = dup_string(kgcd::swap_demo_to_tsv(rows));
    return KGCD_OK;
  });
}

kgcd_status kgcd_session_from_index(const kgcd_index* index, int max_patterns,
                                    int strict_pairs, kgcd_session** out) {
  if (auto st = need(index, "index")) return st;
  if (auto st = need(out, "out")) return st;
  return guarded([&] {
    auto s = std::make_unique<kgcd_session>();
    s->index = index->index;
    s->grammar = std::make_unique<kgcd::Grammar>(
        *s->index, kgcd::GrammarConfig{max_patterns});
    s->strict_pairs = strict_pairs != 0;
    *out = s.release();
    return KGCD_OK;
  });
}

kgcd_status kgcd_session_open(const char* index_path, int max_patterns,
                              int strict_pairs, kgcd_session** out) {
  kgcd_index* idx = nullptr;
  if (auto st = kgcd_index_load(index_path, &idx)) return st;
  const kgcd_status st = kgcd_session_from_index(idx, max_patterns, strict_pairs, out);
  kgcd_index_free(idx);
  return st;
}

void kgcd_session_close(kgcd_session* session) { delete session; }

size_t kgcd_session_vocab_size(const kgcd_session* session) {
  return session ? session->index->vocab().size() : 0;
}

const char* kgcd_session_token(const kgcd_session* session, uint32_t token) {
  if (!session || token >= session->index->vocab().size()) return nullptr;
  return session->index->vocab().text(token).c_str();
}

kgcd_status kgcd_session_token_id(const kgcd_session* session, const char* text,
                                  uint32_t* out) {
  if (auto st = need(session, "session")) return st;
  if (auto st = need(text, "text")) return st;
  if (auto st = need(out, "out")) return st;
  auto id = session->index->vocab().find(text);
  if (!id) return fail(KGCD_ERR_TOKENIZE, std::string("unknown token: ") + text);
  *out = *id;
  return KGCD_OK;
}

size_t kgcd_session_mask_bytes(const kgcd_session* session) {
  return session ? (session->index->vocab().size() + 7) / 8 : 0;
}

kgcd_status kgcd_seq_begin(kgcd_session* session, uint64_t seq) {
  if (auto st = need(session, "session")) return st;
  return guarded([&] {
    auto state = std::make_shared<kgcd::DecoderState>(session->grammar->initial_state());
    std::unique_lock lock(session->mu);
    if (!session->seqs.emplace(seq, std::move(state)).second) {
      throw kgcd::InvalidArgument("sequence id already in use: " + std::to_string(seq));
    }
    return KGCD_OK;
  });
}

kgcd_status kgcd_seq_fork(kgcd_session* session, uint64_t from, uint64_t to) {
  if (auto st = need(session, "session")) return st;
  return guarded([&] {
    std::unique_lock lock(session->mu);
    auto it = session->seqs.find(from);
    if (it == session->seqs.end()) {
      return fail(KGCD_ERR_UNKNOWN_SEQUENCE, "unknown sequence " + std::to_string(from));
    }
    auto copy = std::make_shared<kgcd::DecoderState>(*it->second);
    if (!session->seqs.emplace(to, std::move(copy)).second) {
      throw kgcd::InvalidArgument("sequence id already in use: " + std::to_string(to));
    }
    return KGCD_OK;
  });
}

kgcd_status kgcd_seq_release(kgcd_session* session, uint64_t seq) {
  if (auto st = need(session, "session")) return st;
  std::unique_lock lock(session->mu);
  if (session->seqs.erase(seq) == 0) {
    return fail(KGCD_ERR_UNKNOWN_SEQUENCE, "unknown sequence " + std::to_string(seq));
  }
  return KGCD_OK;
}

kgcd_status kgcd_seq_advance(kgcd_session* session, uint64_t seq,
                             uint32_t token) {
  if (auto st = need(session, "session")) return st;
  auto state = find_seq(session, seq);
  if (!state) {
    return fail(KGCD_ERR_UNKNOWN_SEQUENCE, "unknown sequence " + std::to_string(seq));
  }
  return guarded([&] {
    *state = session->grammar->advance(*state, token);
    return KGCD_OK;
  });
}

kgcd_status kgcd_seq_allowed_mask(kgcd_session* session, uint64_t seq, int mode,
                                  uint8_t* out, size_t out_len) {
  if (auto st = need(session, "session")) return st;
  if (auto st = need(out, "out")) return st;
  auto state = find_seq(session, seq);
  if (!state) {
    return fail(KGCD_ERR_UNKNOWN_SEQUENCE, "unknown sequence " + std::to_string(seq));
  }
  return guarded([&] {
    if (out_len < kgcd_session_mask_bytes(session)) {
      throw kgcd::InvalidArgument("mask buffer too small");
    }
    const kgcd::MaskOptions opts{to_mode(mode), session->strict_pairs};
    const auto packed = kgcd::allowed_tokens(*session->grammar, *state, opts).pack();
    std::memcpy(out, packed.data(), packed.size());
    std::memset(out + packed.size(), 0, out_len - packed.size());
    return KGCD_OK;
  });
}

kgcd_status kgcd_seq_finished(kgcd_session* session, uint64_t seq,
                              int* finished) {
  if (auto st = need(session, "session")) return st;
  if (auto st = need(finished, "finished")) return st;
  auto state = find_seq(session, seq);
  if (!state) {
    return fail(KGCD_ERR_UNKNOWN_SEQUENCE, "unknown sequence " + std::to_string(seq));
  }
  *finished = state->slot == kgcd::SlotKind::End;
  return KGCD_OK;
}

}  // extern "C"
