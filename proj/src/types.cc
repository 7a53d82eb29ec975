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

#include "uab/types.h"

#include <cmath>
#include <numeric>
#include <unordered_set>

#include "uab/errors.h"

namespace uab {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kMissingProbability: return "missing_probability";
    case ErrorCode::kNoTokens: return "no tokens";
    case ErrorCode::kVcsUnparsable: return "vcs_unparsable";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kNoVotes: return "no votes";
    case ErrorCode::kNoEligibleQuestions: return "no eligible questions";
    case ErrorCode::kInstanceTooLarge: return "instance_too_large";
    case ErrorCode::kMismatchedIds: return "mismatched_ids";
    case ErrorCode::kUndefinedCorrelation: return "undefined correlation";
    case ErrorCode::kUnknownQuestion: return "unknown_question";
    case ErrorCode::kBackend: return "backend";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

std::string_view TaskKindName(TaskKind kind) {
  return kind == TaskKind::kOpenMath ? "open_math" : "multiple_choice";
}

TaskKind ParseTaskKind(std::string_view name) {
  if (name == "open_math") return TaskKind::kOpenMath;
  if (name == "multiple_choice") return TaskKind::kMultipleChoice;
  throw Error(ErrorCode::kValidation,
              "unknown task kind '" + std::string(name) + "'");
}

int64_t CountUtf8Chars(std::string_view text) {
  int64_t count = 0;
  for (size_t i = 0; i < text.size();) {
    const auto lead = static_cast<unsigned char>(text[i]);
    size_t width = 1;
    if (lead >= 0xF0 && lead < 0xF8) {
      width = 4;
    } else if (lead >= 0xE0) {
      width = lead < 0xF0 ? 3 : 1;
    } else if (lead >= 0xC0) {
      width = 2;
    }
    bool well_formed = i + width <= text.size();
    for (size_t k = 1; well_formed && k < width; ++k) {
      well_formed = (static_cast<unsigned char>(text[i + k]) & 0xC0) == 0x80;
    }
    i += well_formed ? width : 1;
    ++count;
  }
  return count;
}

QuestionRecord QuestionRecord::Make(std::string id, std::string prompt,
                                    std::optional<std::string> gold_answer,
                                    TaskKind task_kind) {
  QuestionRecord q;
  q.length_chars = CountUtf8Chars(prompt);
  q.id = std::move(id);
  q.prompt = std::move(prompt);
  q.gold_answer = std::move(gold_answer);
  q.task_kind = task_kind;
  return q;
}

void ValidateQuestions(std::span<const QuestionRecord> questions) {
  std::unordered_set<std::string_view> seen;
  for (const auto& q : questions) {
    if (!seen.insert(q.id).second) {
      throw Error(ErrorCode::kValidation, "duplicate question id '" + q.id + "'");
    }
    if (q.length_chars != CountUtf8Chars(q.prompt)) {
      throw Error(ErrorCode::kValidation,
                  "length_chars does not match prompt for '" + q.id + "'");
    }
  }
}

std::string_view SignalKindName(SignalKind kind) {
  switch (kind) {
    case SignalKind::kAnll: return "anll";
    case SignalKind::kTotalNll: return "total_nll";
    case SignalKind::kTokenVar: return "token_var";
    case SignalKind::kMaxTokenNll: return "max_token_nll";
    case SignalKind::kVcs: return "vcs";
    case SignalKind::kVoteEntropy: return "vote_entropy";
    case SignalKind::kLength: return "length";
    case SignalKind::kExternal: return "external";
  }
  return "unknown";
}

SignalKind ParseSignalKind(std::string_view name) {
  for (auto kind : {SignalKind::kAnll, SignalKind::kTotalNll,
                    SignalKind::kTokenVar, SignalKind::kMaxTokenNll,
                    SignalKind::kVcs, SignalKind::kVoteEntropy,
                    SignalKind::kLength, SignalKind::kExternal}) {
    if (SignalKindName(kind) == name) return kind;
  }
  throw Error(ErrorCode::kValidation,
              "unknown signal kind '" + std::string(name) + "'");
}

bool SignalNeedsLogprobs(SignalKind kind) {
  return kind == SignalKind::kAnll || kind == SignalKind::kTotalNll ||
         kind == SignalKind::kTokenVar || kind == SignalKind::kMaxTokenNll;
}

BudgetSpec::BudgetSpec(int64_t n_per_question, int64_t m_questions,
                       double temperature)
    : n_per_question_(n_per_question),
      m_questions_(m_questions),
      temperature_(temperature) {
  if (n_per_question < 1) {
    throw Error(ErrorCode::kValidation, "n_per_question must be >= 1");
  }
  if (m_questions < 1) {
    throw Error(ErrorCode::kValidation, "m_questions must be >= 1");
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kValidation, "temperature must be finite and > 0");
  }
}

ProbTable ProbTable::FromValues(std::span<const double> probs) {
  ProbTable table;
  for (size_t i = 0; i < probs.size(); ++i) {
    table.Add("q" + std::to_string(i), probs[i]);
  }
  return table;
}

void ProbTable::Add(std::string id, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kValidation, "probability for '" + id +
                                            "' outside [0,1]: " +
                                            std::to_string(p));
  }
  auto [it, inserted] = index_.emplace(id, probs_.size());
  if (!inserted) {
    throw Error(ErrorCode::kValidation, "duplicate question id '" + id + "'");
  }
  ids_.push_back(std::move(id));
  probs_.push_back(p);
}

std::optional<size_t> ProbTable::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double ProbTable::At(std::string_view id) const {
  auto idx = Find(id);
  if (!idx) {
    throw Error(ErrorCode::kMissingProbability,
                "no probability for question '" + std::string(id) + "'");
  }
  return probs_[*idx];
}

AllocationVector AllocationVector::Zeros(const std::vector<std::string>& ids,
                                         int64_t budget_effective) {
  AllocationVector alloc;
  alloc.ids = ids;
  alloc.extras.assign(ids.size(), 0);
  alloc.budget_effective = budget_effective;
  return alloc;
}

int64_t AllocationVector::Allocated() const {
  return std::accumulate(extras.begin(), extras.end(), int64_t{0});
}

std::optional<int64_t> AllocationVector::ExtraFor(std::string_view id) const {
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return extras[i];
  }
  return std::nullopt;
}

std::string_view PhaseName(Phase phase) {
  return phase == Phase::kPhase1 ? "phase1" : "phase2";
}

std::string_view FinishReasonName(FinishReason reason) {
  switch (reason) {
    case FinishReason::kStop: return "stop";
    case FinishReason::kLength: return "length";
    case FinishReason::kError: return "error";
  }
  return "error";
}

FinishReason ParseFinishReason(std::string_view name) {
  if (name == "stop") return FinishReason::kStop;
  if (name == "length") return FinishReason::kLength;
  return FinishReason::kError;
}

}  // namespace uab
