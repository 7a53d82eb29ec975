// Copyright 2026 The UAB Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UAB_EXPERIMENT_H_
#define UAB_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "uab/config.h"
#include "uab/http_backend.h"
#include "uab/metrics.h"
#include "uab/pipeline.h"
#include "uab/simulated_backend.h"

namespace uab {

enum class BackendKind { kSimulated, kHttp };

std::string_view BackendKindName(BackendKind kind);
BackendKind ParseBackendKind(std::string_view name);

struct ExperimentConfig {
  // budget.m_questions is replaced by the size of the question set at run time.
  PipelineConfig pipeline;
  BackendKind backend = BackendKind::kSimulated;
  // The world is fixed across seeds; seeds drive sampling and baseline RNG.
  WorldConfig world;
  HttpBackendConfig http;
  std::optional<std::filesystem::path> questions_path;
  std::optional<std::filesystem::path> cache_dir;
  std::vector<uint64_t> seeds{0, 1, 2};
  std::filesystem::path output_dir = "results";
  // Write per-seed JSONL and the aggregate CSV row.
  bool write_files = true;

  void Validate() const;
};

// Every key BuildExperimentConfig understands; see README for meanings.
std::span<const std::string_view> KnownConfigKeys();

// Throws kConfig on unknown keys or unparsable values. Credentials are taken
// from the process environment only.
ExperimentConfig BuildExperimentConfig(const ConfigStore& settings);

// JSONL with fields id, prompt and optional gold_answer and task_kind.
std::vector<QuestionRecord> LoadQuestionsJsonl(const std::filesystem::path& path);

struct SeedReport {
  uint64_t seed = 0;
  // NaN when no question has a gold answer.
  double accuracy = 0.0;
  // Mean per-question coverage under the estimated probabilities.
  double coverage_estimated = 0.0;
  // Fraction of questions with at least one correct sample.
  double coverage_realized = 0.0;
  int64_t samples_issued = 0;
  int64_t budget_effective = 0;
  int64_t saved_units = 0;
  std::optional<double> anll_correctness_pearson;
  DecileAllocation deciles;
};

struct MetricReport {
  std::string policy;
  int64_t n_per_question = 0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  double coverage_mean = 0.0;
  double realized_coverage_mean = 0.0;
  int64_t samples_issued = 0;
  double budget_saved_pct = 0.0;
  std::optional<double> anll_correctness_pearson;
  std::optional<std::vector<double>> per_decile_allocation;
  std::vector<SeedReport> seeds;
  std::vector<uint64_t> failed_seeds;
};

// One ExperimentResult per line, fields in a fixed order.
std::string ResultsToJsonl(const PipelineRun& run);

// Scores a finished run. Coverage uses the run's own probability estimates.
SeedReport ScoreRun(uint64_t seed, const PipelineRun& run);

inline constexpr std::string_view kAggregateCsvHeader =
    "policy,N,seed_count,acc_mean,acc_std,coverage_mean,saved_pct";

std::string AggregateCsvRow(const MetricReport& report);

// Runs the pipeline once per seed. A seed that throws is logged and listed in
// failed_seeds; the remaining seeds still run and are aggregated.
MetricReport RunExperiment(const ExperimentConfig& config);

nlohmann::ordered_json ReportToJson(const MetricReport& report);

}  // namespace uab

#endif  // UAB_EXPERIMENT_H_
