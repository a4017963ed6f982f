// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors
//
// kgcd command-line tool. Results go to stdout (or --report), logs to stderr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kgcd/kgcd.h"

namespace {

struct IndexDeleter {
  void operator()(kgcd_index* p) const { kgcd_index_free(p); }
};
struct EngineDeleter {
  void operator()(kgcd_engine* p) const { kgcd_engine_free(p); }
};
struct ResultDeleter {
  void operator()(kgcd_result* p) const { kgcd_result_free(p); }
};
using IndexPtr = std::unique_ptr<kgcd_index, IndexDeleter>;
using EnginePtr = std::unique_ptr<kgcd_engine, EngineDeleter>;
using ResultPtr = std::unique_ptr<kgcd_result, ResultDeleter>;

struct CApiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(kgcd_status st) {
  if (st != KGCD_OK) {
    throw CApiError(std::string(kgcd_status_name(st)) + ": " + kgcd_last_error());
  }
}

// Takes ownership of a malloc'd string from the library.
std::string take(char* s) {
  std::string out = s ? s : "";
  kgcd_string_free(s);
  return out;
}

IndexPtr load_index(const std::string& path) {
  kgcd_index* idx = nullptr;
  check(kgcd_index_load(path.c_str(), &idx));
  return IndexPtr(idx);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CApiError("cannot write " + path);
  out << text;
  if (!out) throw CApiError("write failed: " + path);
}

int parse_mode(const std::string& s) {
  if (s == "full") return KGCD_MODE_FULL;
  if (s == "no-pruning") return KGCD_MODE_NO_PRUNING;
  if (s == "unconstrained") return KGCD_MODE_UNCONSTRAINED;
  throw CLI::ValidationError("--mode", "unknown mode " + s);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CApiError("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

// "1-10" or "1,3,7".
std::vector<int> parse_beams(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto dash = part.find('-');
    if (dash != std::string::npos) {
      int lo = std::stoi(part.substr(0, dash));
      int hi = std::stoi(part.substr(dash + 1));
      for (int b = lo; b <= hi; ++b) out.push_back(b);
    } else {
      out.push_back(std::stoi(part));
    }
  }
  return out;
}

struct Common {
  std::string mode = "full";
  int beam = 10;
  int max_len = 128;
  int max_patterns = 4;
  bool strict_pairs = false;
  std::string scorer = "uniform";
  std::uint64_t seed = 0;
  unsigned threads = 0;

  void add_to(CLI::App* app) {
    app->add_option("--mode", mode, "full, no-pruning or unconstrained")
        ->check(CLI::IsMember({"full", "no-pruning", "unconstrained"}));
    app->add_option("--beam", beam, "Beam size")->check(CLI::PositiveNumber);
    app->add_option("--max-len", max_len, "Maximum query length in tokens")
        ->check(CLI::PositiveNumber);
    app->add_option("--max-patterns", max_patterns, "Maximum triple patterns");
    app->add_flag("--strict-pairs", strict_pairs,
                  "Restrict tails after a concrete head to its (head, relation) pairs");
    app->add_option("--scorer", scorer, "uniform or noisy-oracle:EPS");
    app->add_option("--seed", seed, "Seed for every random choice");
    app->add_option("--threads", threads, "Batch workers (0 = all cores)");
  }

  kgcd_decode_options options() const {
    kgcd_decode_options o;
    kgcd_decode_options_init(&o);
    o.mode = parse_mode(mode);
    o.beam_size = beam;
    o.max_len = max_len;
    o.max_patterns = max_patterns;
    o.strict_pairs = strict_pairs;
    o.scorer = scorer.c_str();
    o.seed = seed;
    o.threads = threads;
    return o;
  }
};

int run_build_index(const std::string& triples, const std::string& labels,
                    const std::string& out) {
  kgcd_index* raw = nullptr;
  check(kgcd_index_build(triples.c_str(), labels.empty() ? nullptr : labels.c_str(),
                         &raw));
  IndexPtr idx(raw);
  size_t e = 0, r = 0, t = 0;
  check(kgcd_index_counts(idx.get(), &e, &r, &t));
  check(kgcd_index_save(idx.get(), out.c_str()));
  std::cout << "entities\t" << e << "\nrelations\t" << r << "\ntriples\t" << t
            << "\n";
  return 0;
}

int run_decode(const std::string& index_path, std::vector<std::string> questions,
               const std::string& batch_path, const std::string& gold,
               bool as_json, bool expand_iris, const Common& common) {
  if (!batch_path.empty()) {
    auto more = read_lines(batch_path);
    questions.insert(questions.end(), more.begin(), more.end());
  }
  auto idx = load_index(index_path);
  kgcd_engine* raw = nullptr;
  check(kgcd_engine_new(idx.get(), &raw));
  EnginePtr engine(raw);

  auto opts = common.options();
  opts.gold_path = gold.empty() ? nullptr : gold.c_str();
  opts.expand_iris = expand_iris;
  std::vector<const char*> qs;
  for (const auto& q : questions) qs.push_back(q.c_str());
  kgcd_result* rraw = nullptr;
  check(kgcd_decode(engine.get(), &opts, qs.data(), qs.size(),
                    batch_path.empty() ? 0 : 1, &rraw));
  ResultPtr result(rraw);

  int failures = 0;
  for (size_t i = 0; i < kgcd_result_count(result.get()); ++i) {
    if (const char* err = kgcd_result_error(result.get(), i)) {
      std::cerr << "kgcd: question " << i + 1 << ": " << err << "\n";
      ++failures;
    }
    if (as_json) {
      std::cout << kgcd_result_json(result.get(), i) << "\n";
      continue;
    }
    const auto j = nlohmann::json::parse(kgcd_result_json(result.get(), i));
    std::cout << "question\t" << questions[i] << "\n";
    for (size_t k = 0; k < kgcd_result_ranked_count(result.get(), i); ++k) {
      char logp[32];
      std::snprintf(logp, sizeof logp, "%.6f", kgcd_result_logp(result.get(), i, k));
      std::cout << k + 1 << "\t" << logp << "\t"
                << kgcd_result_query(result.get(), i, k) << "\n";
    }
    if (j["answer"].is_null()) {
      std::cout << "answer\tnone\n";
    } else {
      std::string values;
      for (const auto& v : j["answer"]["values"]) {
        if (!values.empty()) values += ";";
        values += v.get<std::string>();
      }
      std::cout << "answer\t" << j["answer"]["rank"].get<size_t>() << "\t"
                << values << "\n";
    }
    std::cout << "\n";
  }
  return failures == 0 ? 0 : 1;
}

int run_eval(const std::string& index_path, const std::string& dataset,
             const std::string& report, const std::string& plot,
             const std::vector<std::string>& modes, const std::string& beams,
             int timing, const Common& common) {
  auto idx = load_index(index_path);
  kgcd_engine* raw = nullptr;
  check(kgcd_engine_new(idx.get(), &raw));
  EnginePtr engine(raw);
  std::vector<int> mode_ids;
  for (const auto& m : modes) mode_ids.push_back(parse_mode(m));
  const auto beam_list = parse_beams(beams);
  const auto opts = common.options();
  char* csv = nullptr;
  char* svg = nullptr;
  check(kgcd_eval(engine.get(), &opts, dataset.c_str(), mode_ids.data(),
                  mode_ids.size(), beam_list.data(), beam_list.size(), timing,
                  &csv, plot.empty() ? nullptr : &svg));
  const std::string csv_text = take(csv);
  const std::string svg_text = take(svg);
  write_text(report, csv_text);
  if (!plot.empty()) write_text(plot, svg_text);
  return 0;
}

int run_swap_demo(const std::string& t0_path, const std::string& t1_path,
                  const std::string& delta, const std::string& report,
                  const Common& common) {
  auto t0 = load_index(t0_path);
  auto t1 = load_index(t1_path);
  auto opts = common.options();
  opts.gold_path = delta.c_str();
  char* text = nullptr;
  size_t before = 0, after = 0;
  check(kgcd_swap_demo(t0.get(), t1.get(), delta.c_str(), &opts, &text, &before,
                       &after));
  write_text(report, take(text));
  std::cerr << "kgcd: answered on t0: " << before << ", on t1: " << after << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained decoding of SPARQL queries against a knowledge graph"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kgcd_version());

  // build-index
  std::string triples, labels, out;
  auto* build = app.add_subcommand("build-index", "Build and save an index");
  build->add_option("--triples", triples, "Triples file (head<TAB>relation<TAB>tail)")
      ->required();
  build->add_option("--labels", labels, "Labels file");
  build->add_option("--out", out, "Index file to write")->required();

  // decode
  Common decode_common;
  std::string index_path, batch_path, gold;
  std::vector<std::string> questions;
  bool as_json = false, expand_iris = false;
  auto* decode = app.add_subcommand("decode", "Decode questions into queries");
  decode->add_option("--index", index_path, "Index file")->required();
  decode->add_option("--question,-q", questions, "Question (repeatable)");
  decode->add_option("--batch", batch_path, "File with one question per line");
  decode->add_option("--gold", gold, "Dataset with gold queries for the noisy oracle");
  decode->add_flag("--json", as_json, "One JSON object per question");
  decode->add_flag("--expand-iris", expand_iris, "Show identifiers as raw keys");
  decode_common.add_to(decode);

  // eval
  Common eval_common;
  std::string eval_index, dataset, report, plot, beams = "1-10";
  std::vector<std::string> modes = {"full", "no-pruning", "unconstrained"};
  int timing = 0;
  auto* eval = app.add_subcommand("eval", "Beam-size sweep and ablation report");
  eval->add_option("--index", eval_index, "Index file")->required();
  eval->add_option("--dataset", dataset, "Dataset file")->required();
  eval->add_option("--report", report, "CSV report path (default stdout)");
  eval->add_option("--plot", plot, "SVG plot path");
  eval->add_option("--modes", modes, "Modes to sweep")
      ->delimiter(',')
      ->check(CLI::IsMember({"full", "no-pruning", "unconstrained"}));
  eval->add_option("--beams", beams, "Beam sizes, e.g. 1-10 or 1,5,10");
  eval->add_option("--timing", timing, "Timing repetitions (0 = no timing column)");
  eval_common.add_to(eval);

  // swap-demo
  Common swap_common;
  std::string t0_path, t1_path, delta, swap_report;
  auto* swap = app.add_subcommand("swap-demo", "Decode a delta set before and after a graph swap");
  swap->add_option("--index-t0", t0_path, "Index before the update")->required();
  swap->add_option("--index-t1", t1_path, "Index after the update")->required();
  swap->add_option("--delta", delta, "Dataset of delta questions")->required();
  swap->add_option("--report", swap_report, "Report path (default stdout)");
  swap_common.add_to(swap);

  // generate
  std::string gen_out;
  bool evolution = false, figure1 = false;
  nlohmann::json spec = nlohmann::json::object();
  std::size_t entities = 20, relations = 4, n_questions = 50, new_entities = 5,
              new_edges = 5;
  double density = 2.0, one_hop = 1.0, two_hop = 0.0, count = 0.0, ask = 0.0;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("generate", "Write a synthetic fixture");
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_flag("--evolution", evolution, "Write a t0/t1 pair and delta.tsv");
  gen->add_flag("--figure1", figure1, "Write the Michael Bay example");
  gen->add_option("--entities", entities);
  gen->add_option("--relations", relations);
  gen->add_option("--density", density, "Triples per entity");
  gen->add_option("--questions", n_questions);
  gen->add_option("--one-hop", one_hop, "Template weight");
  gen->add_option("--two-hop", two_hop, "Template weight");
  gen->add_option("--count", count, "Template weight");
  gen->add_option("--ask", ask, "Template weight");
  gen->add_option("--new-entities", new_entities);
  gen->add_option("--new-edges", new_edges);
  gen->add_option("--seed", gen_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) return run_build_index(triples, labels, out);
    if (*decode) {
      return run_decode(index_path, questions, batch_path, gold, as_json,
                        expand_iris, decode_common);
    }
    if (*eval) {
      return run_eval(eval_index, dataset, report, plot, modes, beams, timing,
                      eval_common);
    }
    if (*swap) return run_swap_demo(t0_path, t1_path, delta, swap_report, swap_common);
    if (*gen) {
      if (figure1) {
        check(kgcd_generate_figure1(gen_out.c_str()));
        return 0;
      }
      spec = {{"entities", entities},   {"relations", relations},
              {"density", density},     {"questions", n_questions},
              {"seed", gen_seed},       {"new_entities", new_entities},
              {"new_edges", new_edges},
              {"mix", {{"one_hop", one_hop}, {"two_hop", two_hop},
                       {"count", count}, {"ask", ask}}}};
      const std::string text = spec.dump();
      check(evolution ? kgcd_generate_evolution(text.c_str(), gen_out.c_str())
                      : kgcd_generate_fixture(text.c_str(), gen_out.c_str()));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "kgcd: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
