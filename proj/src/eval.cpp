// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#include "kgcd/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "kgcd/error.hpp"
#include "kgcd/identifiers.hpp"

namespace kgcd {
namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

std::vector<DatasetItem> parse_dataset(std::string_view text,
                                       const std::string& source) {
  std::vector<DatasetItem> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw FormatError(source, line_no,
                        "expected 3 tab-separated fields, got " +
                            std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw FormatError(source, line_no, "empty question");
    if (fields[1].empty()) throw FormatError(source, line_no, "empty gold query");
    DatasetItem item{fields[0], fields[1], {}};
    if (!fields[2].empty()) {
      for (auto& a : split(fields[2], ';')) {
        if (!a.empty()) item.answers.push_back(std::move(a));
      }
    }
    out.push_back(std::move(item));
    if (end == text.size()) break;
  }
  return out;
}

std::vector<DatasetItem> read_dataset_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str(), path.string());
}

void write_dataset_file(const std::filesystem::path& path,
                        std::span<const DatasetItem> items) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset file: " + path.string());
  for (const auto& it : items) {
    out << it.question << '\t' << it.gold_query << '\t';
    for (std::size_t i = 0; i < it.answers.size(); ++i) {
      if (i) out << ';';
      out << it.answers[i];
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing dataset file: " + path.string());
}

double f1(std::span<const std::string> pred, std::span<const std::string> gold) {
  const std::set<std::string> p(pred.begin(), pred.end());
  const std::set<std::string> g(gold.begin(), gold.end());
  if (p.empty() || g.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& x : p) common += g.count(x);
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(p.size());
  const double recall = static_cast<double>(common) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

int hits_at_1(const std::optional<std::vector<std::string>>& first_answer,
              std::span<const std::string> gold) {
  if (!first_answer) return 0;
  for (const auto& a : *first_answer) {
    if (std::find(gold.begin(), gold.end(), a) != gold.end()) return 1;
  }
  return 0;
}

double inexecutable_rate(std::span<const EvalRecord> records) {
  if (records.empty()) throw InvalidArgument("inexecutable_rate: no records");
  std::size_t bad = 0;
  for (const auto& r : records) bad += r.top1_executable ? 0 : 1;
  return static_cast<double>(bad) / static_cast<double>(records.size());
}

double inexecutable_rate_all(std::span<const EvalRecord> records) {
  if (records.empty()) throw InvalidArgument("inexecutable_rate: no records");
  std::size_t bad = 0;
  for (const auto& r : records) bad += r.executable ? 0 : 1;
  return static_cast<double>(bad) / static_cast<double>(records.size());
}

std::vector<EvalRecord> evaluate(const ConstraintIndex& index,
                                 std::span<const DatasetItem> dataset,
                                 const Scorer& scorer,
                                 const DecodeOptions& options,
                                 std::size_t* skipped) {
  std::vector<const DatasetItem*> items;
  std::vector<std::string> questions;
  std::size_t skip = 0;
  for (const auto& it : dataset) {
    if (it.answers.empty()) {
      ++skip;
      continue;
    }
    items.push_back(&it);
    questions.push_back(it.question);
  }
  if (skipped) *skipped = skip;

  const auto outcomes = batch_decode(index, questions, scorer, options);
  std::vector<EvalRecord> records;
  records.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    EvalRecord rec;
    rec.question = items[i]->question;
    rec.gold_answers = items[i]->answers;
    if (!outcomes[i].result) {
      rec.error = outcomes[i].error;
      records.push_back(std::move(rec));
      continue;
    }
    const auto& ranked = outcomes[i].result->ranked;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
      const bool ok = check_query(ranked[k].text, index).executable();
      if (k == 0) {
        rec.top_query = ranked[k].text;
        rec.top1_executable = ok;
      }
      rec.executable = rec.executable || ok;
    }
    if (auto ans = answer(ranked, index)) {
      const auto answers = ans->result.answers();
      rec.f1 = f1(answers, rec.gold_answers);
      rec.hits1 = hits_at_1(answers, rec.gold_answers);
      rec.chosen_rank = ans->rank;
      rec.predicted = std::move(ans->result);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<SweepRow> beam_sweep(const ConstraintIndex& index,
                                 std::span<const DatasetItem> dataset,
                                 const Scorer& scorer,
                                 const SweepConfig& config) {
  std::vector<SweepRow> rows;
  for (MaskMode mode : config.modes) {
    for (int beam : config.beams) {
      DecodeOptions opt = config.base;
      opt.mask.mode = mode;
      opt.beam_size = beam;
      SweepRow row;
      row.mode = mode;
      row.beam = beam;
      std::vector<EvalRecord> records;
      std::vector<double> ms;
      const int reps = std::max(1, config.timing_repetitions);
      for (int rep = 0; rep < reps; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        records = evaluate(index, dataset, scorer, opt, &row.skipped);
        const auto t1 = std::chrono::steady_clock::now();
        const double total =
            std::chrono::duration<double, std::milli>(t1 - t0).count();
        ms.push_back(records.empty() ? 0.0
                                     : total / static_cast<double>(records.size()));
      }
      if (config.timing_repetitions > 0) {
        std::sort(ms.begin(), ms.end());
        row.mean_ms = ms[ms.size() / 2];
      }
      if (!records.empty()) {
        for (const auto& r : records) {
          row.f1 += r.f1;
          row.hits1 += r.hits1;
        }
        row.f1 /= static_cast<double>(records.size());
        row.hits1 /= static_cast<double>(records.size());
        row.inexec_rate = inexecutable_rate(records);
        row.inexec_rate_all = inexecutable_rate_all(records);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::string out = "mode,beam,f1,hits1,inexec_rate,mean_ms,inexec_rate_all,skipped\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.mode)) + "," + std::to_string(r.beam) + "," +
           fmt(r.f1) + "," + fmt(r.hits1) + "," + fmt(r.inexec_rate) + "," +
           (r.mean_ms ? fmt(*r.mean_ms, "%.3f") : std::string("-")) + "," +
           fmt(r.inexec_rate_all) + "," + std::to_string(r.skipped) + "\n";
  }
  return out;
}

std::string sweep_to_svg(std::span<const SweepRow> rows) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 160, kTop = 30,
                   kBottom = 50;
  int max_beam = 1;
  for (const auto& r : rows) max_beam = std::max(max_beam, r.beam);
  const auto x = [&](int beam) {
    const double span = std::max(1, max_beam - 1);
    return kLeft + (beam - 1) / span * (kW - kLeft - kRight);
  };
  const auto y = [&](double v) { return kTop + (1.0 - v) * (kH - kTop - kBottom); };

  std::map<MaskMode, std::vector<const SweepRow*>> by_mode;
  for (const auto& r : rows) by_mode[r.mode].push_back(&r);

  static const char* kColors[] = {"#1b9e77", "#d95f02", "#7570b3"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << y(0) << "\" x2=\""
      << kW - kRight << "\" y2=\"" << y(0) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << y(0) << "\" x2=\"" << kLeft
      << "\" y2=\"" << y(1) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << y(v) + 4
        << "\" text-anchor=\"end\">" << fmt(v, "%.2f") << "</text>\n";
  }
  for (int b = 1; b <= max_beam; ++b) {
    svg << "<text x=\"" << x(b) << "\" y=\"" << y(0) + 18
        << "\" text-anchor=\"middle\">" << b << "</text>\n";
  }
  svg << "<text x=\"" << (kLeft + kW - kRight) / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\">beam size</text>\n";

  int legend = 0;
  for (const auto& [mode, rs] : by_mode) {
    const char* color = kColors[static_cast<int>(mode) % 3];
    for (int series = 0; series < 2; ++series) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\""
          << (series ? " stroke-dasharray=\"5,4\"" : "") << " points=\"";
      for (const SweepRow* r : rs) {
        svg << x(r->beam) << "," << y(series ? r->inexec_rate : r->hits1) << " ";
      }
      svg << "\"/>\n";
      const double ly = kTop + 16.0 * legend++;
      svg << "<line x1=\"" << kW - kRight + 10 << "\" y1=\"" << ly << "\" x2=\""
          << kW - kRight + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
          << "\"" << (series ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
      svg << "<text x=\"" << kW - kRight + 35 << "\" y=\"" << ly + 4 << "\">"
          << to_string(mode) << (series ? " inexec" : " hits@1") << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

bool answered_correctly(const std::optional<Answer>& ans,
                        const DatasetItem& item) {
  if (!ans) return false;
  // Compare query text in rendered form when it can be tokenized.
  bool same_query = ans->query == item.gold_query;
  if (!same_query) {
    try {
      static const Vocabulary v = Vocabulary::standard();
      same_query = detokenize(tokenize_query(item.gold_query, v), v) == ans->query;
    } catch (const TokenizeError&) {
    }
  }
  if (!same_query) return false;
  std::set<std::string> got;
  for (const auto& a : ans->result.answers()) got.insert(a);
  return got == std::set<std::string>(item.answers.begin(), item.answers.end());
}

std::vector<SwapDemoRow> swap_demo(Engine& engine,
                                   std::shared_ptr<const ConstraintIndex> t1,
                                   std::span<const DatasetItem> delta,
                                   const Scorer& scorer,
                                   const DecodeOptions& options) {
  std::vector<SwapDemoRow> rows(delta.size());
  std::vector<std::string> questions;
  for (const auto& it : delta) questions.push_back(it.question);

  auto run = [&](bool after) {
    const auto idx = engine.snapshot();
    const auto outcomes = batch_decode(*idx, questions, scorer, options);
    for (std::size_t i = 0; i < delta.size(); ++i) {
      std::optional<Answer> ans;
      if (outcomes[i].result) ans = answer(outcomes[i].result->ranked, *idx);
      const bool ok = answered_correctly(ans, delta[i]);
      rows[i].question = delta[i].question;
      (after ? rows[i].after : rows[i].before) = std::move(ans);
      (after ? rows[i].answered_after : rows[i].answered_before) = ok;
    }
  };
  run(false);
  engine.swap_graph(std::move(t1));
  run(true);
  return rows;
}

std::string swap_demo_to_tsv(std::span<const SwapDemoRow> rows) {
  auto render = [](const std::optional<Answer>& a) {
    if (!a) return std::string("none");
    std::string s;
    for (const auto& v : a->result.answers()) s += (s.empty() ? "" : ";") + v;
    return s;
  };
  std::string out = "question\tbefore\tafter\ttransition\n";
  for (const auto& r : rows) {
    out += r.question + "\t" + render(r.before) + "\t" + render(r.after) + "\t" +
           (r.answered_before ? "answered" : "unanswered") + "->" +
           (r.answered_after ? "answered" : "unanswered") + "\n";
  }
  return out;
}

}  // namespace kgcd
