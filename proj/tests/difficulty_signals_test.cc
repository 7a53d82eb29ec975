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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.h"
#include "uab/signals.h"

namespace uab {
namespace {

using testing::ThrownCode;
using Seq = std::vector<double>;

TEST_CASE("anll examples") {
  CHECK(Anll(Seq{-0.5, -1.5}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Anll(Seq{0.0, 0.0, 0.0}) == 0.0);
  CHECK(Anll(Seq{-2.3, -0.1, -0.6}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("token statistics examples") {
  CHECK(TotalNll(Seq{-0.5, -1.5}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(TokenVar(Seq{-1.0, -1.0}) == 0.0);
  CHECK(MaxTokenNll(Seq{-0.2, -3.0, -0.4}) == 3.0);
  // Population variance: NLLs 1 and 3 have mean 2 and variance 1.
  CHECK(TokenVar(Seq{-1.0, -3.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(TokenVar(Seq{-0.7}) == 0.0);
}

TEST_CASE("token statistics reject bad input") {
  for (auto fn : {&Anll, &TotalNll, &TokenVar, &MaxTokenNll}) {
    CHECK(ThrownCode([&] { fn(Seq{}); }) == ErrorCode::kNoTokens);
    CHECK(ThrownCode([&] { fn(Seq{-0.1, 0.2}); }) == ErrorCode::kValidation);
    CHECK(ThrownCode([&] { fn(Seq{-std::numeric_limits<double>::infinity()}); }) ==
          ErrorCode::kValidation);
    CHECK(ThrownCode([&] { fn(Seq{std::nan("")}); }) == ErrorCode::kValidation);
  }
}

TEST_CASE("anll is order and replication invariant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lp(-5.0, 0.0);
  for (int t = 0; t < 100; ++t) {
    Seq x(1 + t % 17);
    for (double& v : x) v = lp(rng);
    Seq shuffled = x;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(Anll(shuffled) == doctest::Approx(Anll(x)).epsilon(1e-13));
    const Seq copies(5, x[0]);
    CHECK(Anll(copies) == doctest::Approx(Anll(Seq{x[0]})).epsilon(1e-14));
  }
}

TEST_CASE("score to probability") {
  CHECK(ScoreToProb(0.0, 0.2) == 1.0);
  CHECK(ScoreToProb(0.0, 1e6) == 1.0);
  CHECK(ScoreToProb(1.0, 0.2) == doctest::Approx(0.0067379).epsilon(1e-7 / 0.0067379));
  CHECK(std::abs(ScoreToProb(1.0, 0.2) - 0.0067379) <= 1e-7);
  CHECK(std::abs(ScoreToProb(0.3, 0.2) - 0.2231302) <= 1e-7);
  CHECK(ThrownCode([] { ScoreToProb(-0.1, 0.2); }) == ErrorCode::kValidation);
  CHECK(ThrownCode([] { ScoreToProb(0.1, 0.0); }) == ErrorCode::kValidation);
}

TEST_CASE("score to probability temperature limits") {
  for (double s : {0.01, 0.5, 3.0}) {
    CHECK(std::abs(ScoreToProb(s, 1e9) - 1.0) <= 1e-6);
    CHECK(std::abs(ScoreToProb(s, 1e-9)) <= 1e-6);
  }
}

TEST_CASE("probability ranking does not depend on temperature") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> score(0.0, 3.0);
  Seq s(40);
  for (double& v : s) v = score(rng);
  auto argsort = [&](double t) {
    std::vector<size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    Seq p(s.size());
    for (size_t i = 0; i < s.size(); ++i) p[i] = ScoreToProb(s[i], t);
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return p[a] > p[b]; });
    return idx;
  };
  const auto reference = argsort(0.2);
  for (double t : {0.5, 1.0, 2.0, 10.0}) CHECK(argsort(t) == reference);
}

TEST_CASE("parse verbalized confidence") {
  CHECK(ParseVcs("the answer is 7. Confidence: 7") == doctest::Approx(0.7));
  CHECK(ParseVcs("Confidence: 10") == 1.0);
  CHECK(ParseVcs("Confidence:   4.") == doctest::Approx(0.4));
  CHECK(ParseVcs("Confidence: 2\nrevised. Confidence: 9!") == doctest::Approx(0.9));
  CHECK(ParseVcs("Confidence: 6 and later Confidence: none") == doctest::Approx(0.6));
  CHECK(ThrownCode([] { ParseVcs("no rating given"); }) == ErrorCode::kVcsUnparsable);
  CHECK(ThrownCode([] { ParseVcs("Confidence: 0"); }) == ErrorCode::kVcsUnparsable);
  CHECK(ThrownCode([] { ParseVcs("Confidence: 11"); }) == ErrorCode::kVcsUnparsable);
  CHECK(ThrownCode([] { ParseVcs("Confidence: 100000000000000000000"); }) ==
        ErrorCode::kVcsUnparsable);
}

TEST_CASE("vcs instruction is appended to the question") {
  const std::string prompt = WithVcsInstruction("What is 2+2?");
  CHECK(prompt.rfind("What is 2+2?", 0) == 0);
  CHECK(prompt.find(kVcsInstruction) != std::string::npos);
}

double EntropyByCounting(const std::vector<std::string>& answers) {
  std::map<std::string, double> freq;
  for (const auto& a : answers) freq[a] += 1.0;
  double h = 0.0;
  for (const auto& [_, c] : freq) {
    const double q = c / static_cast<double>(answers.size());
    h += q * std::log(1.0 / q);
  }
  return h;
}

TEST_CASE("vote entropy examples") {
  CHECK(VoteEntropy(std::vector<std::string>{"A", "A"}) == 0.0);
  CHECK(VoteEntropy(std::vector<std::string>{"A", "B"}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const std::vector<std::string> mixed = {"A", "A", "B", "C"};
  CHECK(VoteEntropy(mixed) == doctest::Approx(1.0397207708399179).epsilon(1e-14));
  CHECK(VoteEntropy(mixed) == doctest::Approx(EntropyByCounting(mixed)).epsilon(1e-14));
  CHECK(ThrownCode([] { VoteEntropy(std::vector<std::string>{}); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("vote entropy bounds") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const size_t k = 2 + t % 7;
    std::vector<std::string> answers(k);
    std::uniform_int_distribution<int> pick(0, 3);
    for (auto& a : answers) a = std::string(1, static_cast<char>('A' + pick(rng)));
    const double h = VoteEntropy(answers);
    CHECK(h == doctest::Approx(EntropyByCounting(answers)).epsilon(1e-13));
    CHECK(h >= 0.0);
    CHECK(h <= std::log(static_cast<double>(k)) + 1e-12);
    std::map<std::string, int> distinct;
    for (const auto& a : answers) ++distinct[a];
    CHECK((distinct.size() == k) == (std::abs(h - std::log(static_cast<double>(k))) < 1e-12));
    CHECK((distinct.size() == 1) == (h == 0.0));
  }
}

}  // namespace
}  // namespace uab
