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

#include "uab/judge.h"

#include <cctype>
#include <optional>

#include <spdlog/spdlog.h>

#include "uab/errors.h"

namespace uab {

std::string_view JudgeLabelName(JudgeLabel label) {
  return label == JudgeLabel::kEasy ? "easy" : "hard";
}

std::string JudgePrompt(std::string_view question_text) {
  std::string prompt(kJudgeInstruction);
  prompt += "\n\n";
  prompt += question_text;
  return prompt;
}

JudgeLabel ParseJudgeLabel(std::string_view response) {
  std::string token;
  auto flush = [&token]() -> std::optional<JudgeLabel> {
    std::optional<JudgeLabel> label;
    if (token == "easy") label = JudgeLabel::kEasy;
    if (token == "hard") label = JudgeLabel::kHard;
    token.clear();
    return label;
  };
  for (char c : response) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (auto label = flush()) {
      return *label;
    }
  }
  if (auto label = flush()) return *label;
  return JudgeLabel::kHard;
}

JudgeLabel JudgeClassify(const QuestionRecord& question, Backend& backend) {
  BackendRequest request;
  request.question_id = question.id;
  request.prompt = JudgePrompt(question.prompt);
  request.sample_count = 1;
  request.sampling_temperature = 0.0;
  request.max_tokens = 8;
  request.want_logprobs = false;
  try {
    BackendResponse response = backend.Generate(request);
    if (response.samples.empty()) return JudgeLabel::kHard;
    return ParseJudgeLabel(response.samples.front().text);
  } catch (const Error& e) {
    spdlog::warn("judge call failed for '{}': {}; labelling hard", question.id,
                 e.what());
    return JudgeLabel::kHard;
  }
}

}  // namespace uab
