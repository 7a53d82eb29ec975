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

#include "uab/signals.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>

#include "uab/errors.h"

namespace uab {
namespace {

void CheckLogprobs(std::span<const double> token_logprobs) {
  if (token_logprobs.empty()) {
    throw Error(ErrorCode::kNoTokens, "empty token log-probability sequence");
  }
  for (double lp : token_logprobs) {
    if (!std::isfinite(lp) || lp > 0.0) {
      throw Error(ErrorCode::kValidation,
                  "token log-probability must be finite and <= 0, got " +
                      std::to_string(lp));
    }
  }
}

}  // namespace

double Anll(std::span<const double> token_logprobs) {
  return TotalNll(token_logprobs) / static_cast<double>(token_logprobs.size());
}

double TotalNll(std::span<const double> token_logprobs) {
  CheckLogprobs(token_logprobs);
  double total = 0.0;
  for (double lp : token_logprobs) total -= lp;
  return total;
}

double TokenVar(std::span<const double> token_logprobs) {
  const double mean = Anll(token_logprobs);
  double sq = 0.0;
  for (double lp : token_logprobs) {
    const double d = -lp - mean;
    sq += d * d;
  }
  return sq / static_cast<double>(token_logprobs.size());
}

double MaxTokenNll(std::span<const double> token_logprobs) {
  CheckLogprobs(token_logprobs);
  return -*std::min_element(token_logprobs.begin(), token_logprobs.end());
}

double ScoreToProb(double score, double temperature) {
  if (!(score >= 0.0) || !std::isfinite(score)) {
    throw Error(ErrorCode::kValidation,
                "score must be finite and >= 0, got " + std::to_string(score));
  }
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::kValidation, "temperature must be > 0");
  }
  return std::exp(-score / temperature);
}

std::string WithVcsInstruction(std::string_view question_text) {
  std::string prompt(question_text);
  prompt += "\n\n";
  prompt += kVcsInstruction;
  return prompt;
}

double ParseVcs(std::string_view text) {
  static constexpr std::string_view kTag = "Confidence:";
  std::optional<long> rating;
  for (size_t pos = text.find(kTag); pos != std::string_view::npos;
       pos = text.find(kTag, pos + 1)) {
    size_t i = pos + kTag.size();
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      ++j;
    }
    if (j == i) continue;
    // A digit run longer than two characters is out of range anyway.
    rating = j - i > 2 ? 99 : std::stol(std::string(text.substr(i, j - i)));
  }
  if (!rating) {
    throw Error(ErrorCode::kVcsUnparsable, "no 'Confidence: <integer>' found");
  }
  if (*rating < 1 || *rating > 10) {
    throw Error(ErrorCode::kVcsUnparsable,
                "confidence rating out of range: " + std::to_string(*rating));
  }
  return static_cast<double>(*rating) / 10.0;
}

double VoteEntropy(std::span<const std::string> answers) {
  if (answers.empty()) {
    throw Error(ErrorCode::kEmptyInput, "vote entropy needs at least one answer");
  }
  std::map<std::string_view, int64_t> counts;
  for (const auto& a : answers) ++counts[a];
  const double k = static_cast<double>(answers.size());
  double h = 0.0;
  for (const auto& [answer, count] : counts) {
    const double q = static_cast<double>(count) / k;
    h -= q * std::log(q);
  }
  return h;
}

}  // namespace uab
