// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgcd Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgcd/beam_search.hpp"
#include "kgcd/engine.hpp"
#include "kgcd/executor.hpp"

namespace kgcd {

/// One line of a dataset file.
struct DatasetItem {
  std::string question;
  std::string gold_query;
  std::vector<std::string> answers;

  bool operator==(const DatasetItem&) const = default;
};

/// Tab-separated: question, gold query, ';'-separated answers. '#' lines and
/// blank lines are skipped. Throws FormatError with the line number.
std::vector<DatasetItem> parse_dataset(std::string_view text,
                                       const std::string& source = "<memory>");
std::vector<DatasetItem> read_dataset_file(const std::filesystem::path& path);
void write_dataset_file(const std::filesystem::path& path,
                        std::span<const DatasetItem> items);

/// Answer-set F1; 0 when `pred` is empty. Duplicates are ignored.
double f1(std::span<const std::string> pred, std::span<const std::string> gold);
/// 1 iff an answer was returned and it intersects `gold`.
int hits_at_1(const std::optional<std::vector<std::string>>& first_answer,
              std::span<const std::string> gold);

struct EvalRecord {
  std::string question;
  std::vector<std::string> gold_answers;
  std::optional<ResultSet> predicted;
  std::optional<std::size_t> chosen_rank;
  std::string top_query;
  /// Some ranked candidate is executable (see check_query()).
  bool executable = false;
  /// The top-ranked candidate exists and is executable.
  bool top1_executable = false;
  double f1 = 0.0;
  int hits1 = 0;
  std::string error;  // decode failure, if any
};

/// Fraction of records whose top-1 candidate is not executable. Throws
/// InvalidArgument on an empty list.
double inexecutable_rate(std::span<const EvalRecord> records);
/// Fraction of records without any executable candidate.
double inexecutable_rate_all(std::span<const EvalRecord> records);

/// Decodes every item (batch), answers it and scores it. Items without gold
/// answers are skipped and counted in `skipped`.
std::vector<EvalRecord> evaluate(const ConstraintIndex& index,
                                 std::span<const DatasetItem> dataset,
                                 const Scorer& scorer,
                                 const DecodeOptions& options,
                                 std::size_t* skipped = nullptr);

struct SweepRow {
  MaskMode mode = MaskMode::Full;
  int beam = 1;
  double f1 = 0.0;
  double hits1 = 0.0;
  double inexec_rate = 0.0;
  double inexec_rate_all = 0.0;
  /// Median over repetitions of the mean wall-clock per question, when timed.
  std::optional<double> mean_ms;
  std::size_t skipped = 0;
};

struct SweepConfig {
  std::vector<MaskMode> modes = {MaskMode::Full, MaskMode::NoPruning,
                                 MaskMode::Unconstrained};
  std::vector<int> beams = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  DecodeOptions base;
  /// Repetitions for timing; 0 leaves mean_ms empty so the report does not
  /// depend on the machine.
  int timing_repetitions = 0;
};

/// One row per (mode, beam), in the order of `config.modes` x `config.beams`.
std::vector<SweepRow> beam_sweep(const ConstraintIndex& index,
                                 std::span<const DatasetItem> dataset,
                                 const Scorer& scorer,
                                 const SweepConfig& config);

/// Header "mode,beam,f1,hits1,inexec_rate,mean_ms,inexec_rate_all,skipped";
/// untimed rows print "-" for mean_ms.
std::string sweep_to_csv(std::span<const SweepRow> rows);
/// Line plot (SVG) of Hits@1 and inexecutable rate against beam size.
std::string sweep_to_svg(std::span<const SweepRow> rows);

/// An item counts as answered when the chosen query is the gold query and
/// its answers equal the gold answers.
bool answered_correctly(const std::optional<Answer>& ans,
                        const DatasetItem& item);

struct SwapDemoRow {
  std::string question;
  std::optional<Answer> before;
  std::optional<Answer> after;
  bool answered_before = false;
  bool answered_after = false;
};

/// Decodes `delta` with `engine` as is, swaps the engine to `t1`, and decodes
/// again with the same scorer.
std::vector<SwapDemoRow> swap_demo(Engine& engine,
                                   std::shared_ptr<const ConstraintIndex> t1,
                                   std::span<const DatasetItem> delta,
                                   const Scorer& scorer,
                                   const DecodeOptions& options);

/// Header "question,before,after,transition" as tab-separated columns.
std::string swap_demo_to_tsv(std::span<const SwapDemoRow> rows);

}  // namespace kgcd
