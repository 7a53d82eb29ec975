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

#include "uab/answers.h"

#include <cctype>
#include <regex>

#include "uab/errors.h"

namespace uab {
namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

bool IsTrailingPunct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
}

// "1,234.50" -> "1234.5"; returns nullopt for anything that is not a plain
// optionally-signed decimal.
std::optional<std::string> NormalizeNumber(std::string_view s) {
  static const std::regex kNumber(R"(^[-+]?(\d{1,3}(,\d{3})+|\d+)(\.\d+)?$|^[-+]?\.\d+$)");
  const std::string text(s);
  if (!std::regex_match(text, kNumber)) return std::nullopt;
  std::string digits;
  for (char c : text) {
    if (c != ',' && c != '+') digits += c;
  }
  bool negative = !digits.empty() && digits.front() == '-';
  if (negative) digits.erase(0, 1);
  std::string int_part = digits;
  std::string frac_part;
  if (auto dot = digits.find('.'); dot != std::string::npos) {
    int_part = digits.substr(0, dot);
    frac_part = digits.substr(dot + 1);
  }
  while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
  size_t first_nonzero = int_part.find_first_not_of('0');
  int_part = first_nonzero == std::string::npos ? "0" : int_part.substr(first_nonzero);
  std::string out = int_part;
  if (!frac_part.empty()) out += "." + frac_part;
  if (negative && out != "0") out = "-" + out;
  return out;
}

std::optional<std::string> LastBoxed(std::string_view text) {
  static constexpr std::string_view kTag = "\\boxed{";
  std::optional<std::string> found;
  for (size_t pos = text.find(kTag); pos != std::string_view::npos;
       pos = text.find(kTag, pos + 1)) {
    size_t i = pos + kTag.size();
    int depth = 1;
    size_t j = i;
    for (; j < text.size() && depth > 0; ++j) {
      if (text[j] == '{') ++depth;
      if (text[j] == '}') --depth;
    }
    if (depth == 0) found = std::string(text.substr(i, j - 1 - i));
  }
  return found;
}

std::optional<std::string> LastNumber(std::string_view text) {
  static const std::regex kToken(R"([-+]?(\d+(,\d{3})*(\.\d+)?|\.\d+)(/\d+)?)");
  std::optional<std::string> found;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kToken);
       it != std::sregex_iterator(); ++it) {
    found = it->str();
  }
  return found;
}

bool IsLetter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::optional<std::string> LastOptionLetter(std::string_view text) {
  std::optional<std::string> found;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (upper < 'A' || upper > 'J') continue;
    const bool left_free = i == 0 || !IsLetter(text[i - 1]);
    const bool right_free = i + 1 == text.size() || !IsLetter(text[i + 1]);
    if (!left_free || !right_free) continue;
    // Lowercase letters only count when marked as options, so the article
    // "a" and similar words are not mistaken for answers.
    const bool marked = (i > 0 && text[i - 1] == '(') ||
                        (i + 1 < text.size() && text[i + 1] == ')');
    if (c != upper && !marked) continue;
    found = std::string(1, upper);
  }
  return found;
}

}  // namespace

std::string CanonicalAnswer(std::string_view raw) {
  std::string_view s = Trim(raw);
  bool changed = true;
  while (changed && !s.empty()) {
    changed = false;
    while (!s.empty() && IsTrailingPunct(s.back())) {
      s.remove_suffix(1);
      changed = true;
    }
    if (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
      s = s.substr(1, s.size() - 2);
      changed = true;
    }
    const std::string_view trimmed = Trim(s);
    changed = changed || trimmed.size() != s.size();
    s = trimmed;
  }
  if (auto number = NormalizeNumber(s)) return *number;
  return std::string(s);
}

std::optional<std::string> ParseAnswer(std::string_view text, TaskKind kind) {
  std::optional<std::string> raw = LastBoxed(text);
  if (kind == TaskKind::kOpenMath) {
    if (!raw) raw = LastNumber(text);
  } else if (raw) {
    raw = LastOptionLetter(*raw);
  } else {
    raw = LastOptionLetter(text);
  }
  if (!raw) return std::nullopt;
  std::string canonical = CanonicalAnswer(*raw);
  if (canonical.empty()) return std::nullopt;
  return canonical;
}

VoteTally MajorityVote(std::span<const std::optional<std::string>> answers) {
  VoteTally tally;
  for (const auto& a : answers) {
    if (a) ++tally.counts[*a];
  }
  if (tally.counts.empty()) {
    throw Error(ErrorCode::kNoVotes, "every sample abstained");
  }
  int64_t best = 0;
  // std::map iterates in byte order, so the first maximum is the earliest.
  for (const auto& [answer, count] : tally.counts) {
    if (count > best) {
      best = count;
      tally.winner = answer;
    }
  }
  return tally;
}

}  // namespace uab
