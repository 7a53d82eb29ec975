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

#ifndef UAB_ANSWERS_H_
#define UAB_ANSWERS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "uab/types.h"

namespace uab {

// Trims whitespace and surrounding '$', strips trailing punctuation, and
// rewrites plain decimal numbers in shortest form ("4.0" -> "4",
// "1,000" -> "1000", "0.50" -> "0.5").
std::string CanonicalAnswer(std::string_view raw);

// Rule-based final-answer extraction. Open math takes the last \boxed{...}
// and falls back to the last number-like token; multiple choice takes the
// last standalone option letter A-J. Returns nullopt when nothing is
// extractable, which counts as an abstention in the vote.
std::optional<std::string> ParseAnswer(std::string_view text, TaskKind kind);

struct VoteTally {
  std::map<std::string, int64_t> counts;
  std::string winner;
};

// Plurality vote over non-abstaining answers; ties resolve to the
// byte-order earliest answer. Throws kNoVotes when every entry abstains.
VoteTally MajorityVote(std::span<const std::optional<std::string>> answers);

}  // namespace uab

#endif  // UAB_ANSWERS_H_
