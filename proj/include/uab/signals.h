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

#ifndef UAB_SIGNALS_H_
#define UAB_SIGNALS_H_

#include <span>
#include <string>
#include <string_view>

namespace uab {

// Per-token statistics over natural-log token probabilities. Every function
// requires a nonempty sequence of finite values <= 0 and throws kNoTokens or
// kValidation otherwise.
double Anll(std::span<const double> token_logprobs);
double TotalNll(std::span<const double> token_logprobs);
// Population variance of the per-token NLLs.
double TokenVar(std::span<const double> token_logprobs);
double MaxTokenNll(std::span<const double> token_logprobs);

// exp(-score / temperature).
double ScoreToProb(double score, double temperature);

// Instruction appended to a question to elicit a verbalized 1-10 confidence
// rating in the same generation.
inline constexpr std::string_view kVcsInstruction =
    "After giving your answer, rate how confident you are that it is correct "
    "on a scale from 1 (not confident at all) to 10 (completely certain). "
    "End your response with: Confidence: <integer>.";

// Probability assigned when a confidence rating cannot be parsed.
inline constexpr double kVcsFallbackProb = 0.5;

std::string WithVcsInstruction(std::string_view question_text);

// Value of the last "Confidence: <int>" in `text`, divided by 10. Throws
// kVcsUnparsable when absent or outside 1..10.
double ParseVcs(std::string_view text);

// Shannon entropy (nats) of the empirical answer distribution.
double VoteEntropy(std::span<const std::string> answers);

}  // namespace uab

#endif  // UAB_SIGNALS_H_
