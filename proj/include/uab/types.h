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

#ifndef UAB_TYPES_H_
#define UAB_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace uab {

enum class TaskKind { kOpenMath, kMultipleChoice };

std::string_view TaskKindName(TaskKind kind);
TaskKind ParseTaskKind(std::string_view name);

// Number of Unicode code points in a UTF-8 string. Invalid bytes count as one
// character each.
int64_t CountUtf8Chars(std::string_view text);

struct QuestionRecord {
  std::string id;
  std::string prompt;
  std::optional<std::string> gold_answer;
  TaskKind task_kind = TaskKind::kOpenMath;
  int64_t length_chars = 0;

  // Builds a record with length_chars derived from the prompt.
  static QuestionRecord Make(std::string id, std::string prompt,
                             std::optional<std::string> gold_answer = {},
                             TaskKind task_kind = TaskKind::kOpenMath);
};

// Throws kValidation on duplicate ids or a stale length_chars.
void ValidateQuestions(std::span<const QuestionRecord> questions);

enum class SignalKind {
  kAnll,
  kTotalNll,
  kTokenVar,
  kMaxTokenNll,
  kVcs,
  kVoteEntropy,
  kLength,
  kExternal,
};

std::string_view SignalKindName(SignalKind kind);
SignalKind ParseSignalKind(std::string_view name);

// True for signals computed from per-token log-probabilities.
bool SignalNeedsLogprobs(SignalKind kind);

struct DifficultyEstimate {
  std::string question_id;
  double score = 0.0;
  double prob = 1.0;
  SignalKind signal_kind = SignalKind::kAnll;
  // Set when the signal could not be extracted and a fallback prob was used.
  bool fallback = false;
};

class BudgetSpec {
 public:
  static constexpr double kDefaultTemperature = 0.2;

  // Throws kValidation unless n >= 1, m >= 1 and temperature > 0.
  BudgetSpec(int64_t n_per_question, int64_t m_questions,
             double temperature = kDefaultTemperature);

  int64_t n_per_question() const { return n_per_question_; }
  int64_t m_questions() const { return m_questions_; }
  double temperature() const { return temperature_; }
  int64_t total() const { return n_per_question_ * m_questions_; }
  // Phase-2 budget once every question holds `phase1_k` samples.
  int64_t effective(int64_t phase1_k = 1) const {
    return (n_per_question_ - phase1_k) * m_questions_;
  }

 private:
  int64_t n_per_question_;
  int64_t m_questions_;
  double temperature_;
};

// Per-question success probabilities in stable input order. The order defines
// question indices, which the allocators use for tie-breaking.
class ProbTable {
 public:
  ProbTable() = default;
  // Ids default to "q0", "q1", ...
  static ProbTable FromValues(std::span<const double> probs);

  // Throws kValidation on duplicate ids or p outside [0, 1].
  void Add(std::string id, double p);

  size_t size() const { return probs_.size(); }
  bool empty() const { return probs_.empty(); }
  const std::string& id(size_t i) const { return ids_[i]; }
  double p(size_t i) const { return probs_[i]; }
  std::span<const double> values() const { return probs_; }
  const std::vector<std::string>& ids() const { return ids_; }

  std::optional<size_t> Find(std::string_view id) const;
  // Throws kMissingProbability naming the id.
  double At(std::string_view id) const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> probs_;
  std::unordered_map<std::string, size_t> index_;
};

// Phase-2 extra samples per question. Every question also holds its Phase-1
// sample(s), which are not counted here.
struct AllocationVector {
  std::vector<std::string> ids;
  std::vector<int64_t> extras;
  int64_t budget_effective = 0;

  static AllocationVector Zeros(const std::vector<std::string>& ids,
                                int64_t budget_effective);

  size_t size() const { return ids.size(); }
  int64_t Allocated() const;
  // budget_effective - Allocated(); nonzero only for skip-mode exits.
  int64_t Deficit() const { return budget_effective - Allocated(); }
  std::optional<int64_t> ExtraFor(std::string_view id) const;
};

enum class Phase { kPhase1, kPhase2 };
enum class FinishReason { kStop, kLength, kError };

std::string_view PhaseName(Phase phase);
std::string_view FinishReasonName(FinishReason reason);
FinishReason ParseFinishReason(std::string_view name);

struct GenerationRecord {
  std::string question_id;
  Phase phase = Phase::kPhase1;
  int64_t sample_index = 0;
  std::string text;
  std::optional<std::string> parsed_answer;
  std::vector<double> token_logprobs;
  FinishReason finish_reason = FinishReason::kStop;
};

struct ExperimentResult {
  std::string question_id;
  std::string final_answer;
  std::optional<bool> correct;
  int64_t samples_used = 1;
  DifficultyEstimate difficulty;
  std::string policy;
  // Mean ANLL of the Phase-1 samples, when they carried logprobs.
  std::optional<double> anll;
  // At least one sample matched the gold answer.
  std::optional<bool> any_sample_correct;
};

}  // namespace uab

#endif  // UAB_TYPES_H_
