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

#ifndef UAB_JUDGE_H_
#define UAB_JUDGE_H_

#include <string>
#include <string_view>

#include "uab/backend.h"
#include "uab/types.h"

namespace uab {

enum class JudgeLabel { kEasy, kHard };

std::string_view JudgeLabelName(JudgeLabel label);

inline constexpr std::string_view kJudgeInstruction =
    "Is the following question easy or hard for a language model to answer "
    "correctly? Respond with a single word: easy or hard.";

std::string JudgePrompt(std::string_view question_text);

// First whitespace/punctuation-delimited token equal to "easy" or "hard"
// (case-insensitive). Anything else is treated as hard.
JudgeLabel ParseJudgeLabel(std::string_view response);

// One judge call per question. Backend failures also map to hard.
JudgeLabel JudgeClassify(const QuestionRecord& question, Backend& backend);

}  // namespace uab

#endif  // UAB_JUDGE_H_
