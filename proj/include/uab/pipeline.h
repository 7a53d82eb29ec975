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

#ifndef UAB_PIPELINE_H_
#define UAB_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uab/allocation.h"
#include "uab/backend.h"
#include "uab/judge.h"
#include "uab/rng.h"
#include "uab/types.h"

namespace uab {

enum class Policy { kUab, kUniform, kRandom, kLength, kLlmJudge };

std::string_view PolicyName(Policy policy);
Policy ParsePolicy(std::string_view name);

struct PipelineConfig {
  BudgetSpec budget{4, 1};
  SignalKind signal_kind = SignalKind::kAnll;
  ThresholdExitConfig threshold_exit;
  Policy policy = Policy::kUab;
  // Phase-1 samples per question; vote entropy needs at least 2.
  int64_t phase1_samples_k = 1;
  uint64_t rng_seed = 0;
  double sampling_temperature = kDefaultSamplingTemperature;
  int64_t max_tokens = kDefaultMaxTokens;
  // Concurrent backend requests within a phase.
  int parallelism = 8;

  void Validate() const;
};

// Phase-2 allocation for the non-adaptive baselines. Uniform gives every
// question N - K extras; random deals B_eff units uniformly at random; length
// runs the greedy allocator on min-max normalized prompt lengths; the judge
// policy splits B_eff evenly over hard questions with the remainder dealt
// round-robin in input order.
AllocationVector AllocateBaseline(Policy policy,
                                  std::span<const QuestionRecord> questions,
                                  const std::map<std::string, JudgeLabel>* judge_labels,
                                  const BudgetSpec& budget, Rng& rng,
                                  int64_t phase1_k = 1);

// exp(-s/T) over prompt lengths min-max normalized to [0, 1].
ProbTable LengthProbabilities(std::span<const QuestionRecord> questions,
                              double temperature);

// Difficulty of one question from its Phase-1 generations. Falls back to
// p = 0.5 (flagged) when the configured signal cannot be extracted.
DifficultyEstimate EstimateDifficulty(const QuestionRecord& question,
                                      std::span<const GenerationRecord> phase1,
                                      SignalKind signal, double temperature);

struct PipelineRun {
  std::vector<ExperimentResult> results;
  std::vector<GenerationRecord> generations;
  ProbTable probs;
  AllocationVector alloc;
  std::vector<std::string> eligible;
  int64_t samples_issued = 0;
  int64_t saved_units = 0;
  int64_t judge_calls = 0;
};

// Phase 1 (K samples each), difficulty estimation, allocation, Phase 2 and
// majority vote over every sample of each question. Backend failures are
// recorded as error samples that abstain from the vote.
PipelineRun RunTwoPhase(std::span<const QuestionRecord> questions, Backend& backend,
                        const PipelineConfig& config);

}  // namespace uab

#endif  // UAB_PIPELINE_H_
