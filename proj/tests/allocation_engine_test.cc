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
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "test_util.h"
#include "uab/allocation.h"
#include "uab/coverage.h"
#include "uab/signals.h"

namespace uab {
namespace {

using testing::ThrownCode;
using Extras = std::vector<int64_t>;
using Probs = std::vector<double>;

// Brute force over every composition of `budget` into p.size() parts. Returns
// the maximal objective and every allocation attaining it (to 1e-12).
struct Enumerated {
  double best = -1.0;
  std::vector<Extras> argmax;
};

Enumerated Enumerate(const Probs& p, int64_t budget) {
  Enumerated out;
  Extras e(p.size(), 0);
  std::function<void(size_t, int64_t)> rec = [&](size_t i, int64_t left) {
    if (i + 1 == p.size()) {
      e[i] = left;
      double j = 0.0;
      for (size_t k = 0; k < p.size(); ++k) j += 1.0 - std::pow(1.0 - p[k], 1.0 + e[k]);
      if (j > out.best + 1e-12) {
        out.best = j;
        out.argmax = {e};
      } else if (std::abs(j - out.best) <= 1e-12) {
        out.argmax.push_back(e);
      }
      return;
    }
    for (int64_t n = 0; n <= left; ++n) {
      e[i] = n;
      rec(i + 1, left - n);
    }
  };
  rec(0, budget);
  return out;
}

ProbTable Table(const Probs& p) { return ProbTable::FromValues(p); }

TEST_CASE("greedy example with three questions matches enumeration") {
  const Probs p = {0.9, 0.5, 0.2};
  const Enumerated oracle = Enumerate(p, 3);
  REQUIRE(oracle.argmax.size() == 1);
  // Frozen from the enumeration: J(0,1,2) = 0.9 + 0.75 + 0.488 = 2.138.
  CHECK(oracle.argmax[0] == Extras{0, 1, 2});
  CHECK(oracle.best == doctest::Approx(2.138).epsilon(1e-14));
  const AllocationVector alloc = GreedyAllocate(Table(p), 3);
  CHECK(alloc.extras == Extras{0, 1, 2});
  CHECK(alloc.budget_effective == 3);
  CHECK(alloc.ids == std::vector<std::string>{"q0", "q1", "q2"});
}

TEST_CASE("greedy ties go to the lowest index") {
  CHECK(GreedyExtras(Probs{0.5, 0.5}, 2) == Extras{1, 1});
  CHECK(GreedyExtras(Probs{0.5, 0.5}, 1) == Extras{1, 0});
  CHECK(GreedyExtras(Probs{0.3, 0.3, 0.3}, 4) == Extras{2, 1, 1});
}

TEST_CASE("a certain question gains nothing from extras") {
  const Probs p = {1.0, 0.3};
  const Enumerated oracle = Enumerate(p, 5);
  REQUIRE(oracle.argmax.size() == 1);
  CHECK(oracle.argmax[0] == Extras{0, 5});
  CHECK(GreedyExtras(p, 5) == Extras{0, 5});
}

TEST_CASE("zero gains everywhere are dealt round-robin") {
  CHECK(GreedyExtras(Probs{0.0, 0.0}, 2) == Extras{1, 1});
  CHECK(GreedyExtras(Probs{1.0, 0.0, 1.0}, 7) == Extras{3, 2, 2});
  // Positive gains are exhausted first; the residue then cycles from index 0.
  const Extras e = GreedyExtras(Probs{1.0, 1.0 - 1e-300}, 3);
  CHECK(std::accumulate(e.begin(), e.end(), int64_t{0}) == 3);
}

TEST_CASE("greedy argument validation") {
  CHECK(ThrownCode([] { GreedyExtras(Probs{}, 1); }) == ErrorCode::kEmptyInput);
  CHECK(GreedyExtras(Probs{}, 0).empty());
  CHECK(ThrownCode([] { GreedyExtras(Probs{0.5}, -1); }) == ErrorCode::kValidation);
  CHECK(ThrownCode([] { GreedyExtras(Probs{1.5}, 1); }) == ErrorCode::kValidation);
}

TEST_CASE("dp oracle examples") {
  CHECK(DpExtrasExact(Probs{0.7}, 4) == Extras{4});
  const Extras zero = DpExtrasExact(Probs{0.0, 0.0}, 2);
  CHECK(std::accumulate(zero.begin(), zero.end(), int64_t{0}) == 2);
  CHECK(CoverageObjective(zero, Probs{0.0, 0.0}) == 0.0);
  const Probs p = {0.9, 0.5, 0.2};
  CHECK(CoverageObjective(DpExtrasExact(p, 3), p) ==
        doctest::Approx(Enumerate(p, 3).best).epsilon(1e-14));
  const AllocationVector alloc = DpAllocateExact(Table(p), 3);
  CHECK(alloc.Allocated() == 3);
}

TEST_CASE("dp oracle guardrail") {
  CHECK(ThrownCode([] { DpExtrasExact(Probs(13, 0.5), 4); }) == ErrorCode::kInstanceTooLarge);
  CHECK(ThrownCode([] { DpExtrasExact(Probs(3, 0.5), 65); }) == ErrorCode::kInstanceTooLarge);
  CHECK_NOTHROW(DpExtrasExact(Probs(12, 0.5), 64));
}

TEST_CASE("greedy equals dp and enumeration on random small instances") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const size_t m = 1 + t % 4;
    const int64_t b = t % 7;
    Probs p(m);
    for (double& v : p) v = unit(rng);
    const Enumerated oracle = Enumerate(p, b);
    CHECK(std::abs(CoverageObjective(GreedyExtras(p, b), p) - oracle.best) <= 1e-12);
    CHECK(std::abs(CoverageObjective(DpExtrasExact(p, b), p) - oracle.best) <= 1e-12);
  }
}

TEST_CASE("kkt certificate on the three-question greedy output") {
  const ProbTable probs = Table({0.9, 0.5, 0.2});
  const KktCertificate cert = VerifyKkt(GreedyAllocate(probs, 3), probs);
  CHECK(cert.satisfied);
  // Next-unit gains at e = (0,1,2): 0.09, 0.125, 0.1024.
  CHECK(cert.lambda_star == doctest::Approx(0.125).epsilon(1e-14));
  // Last-unit gains of the funded questions: 0.25 and 0.128.
  CHECK(cert.slack == doctest::Approx(0.128 - 0.125).epsilon(1e-12));
  CHECK_FALSE(cert.violating_pair.has_value());
}

TEST_CASE("kkt certificate rejects a lopsided allocation") {
  const ProbTable probs = Table({0.5, 0.5});
  const AllocationVector alloc{probs.ids(), {3, 0}, 3};
  const KktCertificate cert = VerifyKkt(alloc, probs);
  CHECK_FALSE(cert.satisfied);
  REQUIRE(cert.violating_pair.has_value());
  CHECK(cert.violating_pair->first == "q1");
  CHECK(cert.violating_pair->second == "q0");
  // Moving the unit does improve the objective.
  const AllocationVector moved{probs.ids(), {2, 1}, 3};
  CHECK(CoverageObjective(moved, probs) > CoverageObjective(alloc, probs));
}

TEST_CASE("kkt certificate with no Phase-2 budget") {
  const ProbTable probs = Table({0.9, 0.5, 0.2});
  const KktCertificate cert = VerifyKkt(AllocationVector::Zeros(probs.ids(), 0), probs);
  CHECK(cert.satisfied);
  // With the Phase-1 sample counted the price is max p (1 - p).
  CHECK(cert.lambda_star == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(std::isinf(cert.slack));
}

TEST_CASE("kkt certificate requires a conserving allocation") {
  const ProbTable probs = Table({0.4, 0.6});
  const AllocationVector short_alloc{probs.ids(), {1, 0}, 2};
  CHECK(ThrownCode([&] { VerifyKkt(short_alloc, probs); }) == ErrorCode::kValidation);
}

TEST_CASE("every greedy output is certified with lambda in every interval") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    Probs p(1 + t % 20);
    for (double& v : p) v = unit(rng);
    const ProbTable probs = Table(p);
    const AllocationVector alloc = GreedyAllocate(probs, t % 60);
    const KktCertificate cert = VerifyKkt(alloc, probs);
    CHECK(cert.satisfied);
    CHECK(LambdaInKktInterval(cert.lambda_star, alloc, probs));
  }
}

TEST_CASE("sensitivity gap examples") {
  const ProbTable truth = Table({0.5});
  const ProbTable est = Table({0.6});
  const AllocationVector alloc{truth.ids(), {1}, 1};
  const BoundCheck same = SensitivityGap(alloc, truth, truth);
  CHECK(same.value == 0.0);
  CHECK(same.bound == 0.0);
  const BoundCheck gap = SensitivityGap(alloc, truth, est);
  CHECK(gap.value == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(gap.bound == doctest::Approx(0.2).epsilon(1e-12));
  ProbTable other;
  other.Add("z", 0.5);
  CHECK(ThrownCode([&] { SensitivityGap(alloc, truth, other); }) == ErrorCode::kMismatchedIds);
}

TEST_CASE("regret examples") {
  const ProbTable truth = Table({0.9, 0.2});
  const BoundCheck zero = RegretBoundCheck(truth, truth, 2);
  CHECK(zero.value == doctest::Approx(0.0).epsilon(1e-15));
  const ProbTable est = Table({0.2, 0.9});
  const BoundCheck r = RegretBoundCheck(truth, est, 2);
  // Brute force: greedy on est picks (2,0), the truth prefers (0,2).
  const Enumerated best = Enumerate({0.9, 0.2}, 2);
  const double greedy_true = 1.0 - std::pow(0.1, 3) + 0.2;
  CHECK(r.value == doctest::Approx(best.best - greedy_true).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(0.189).epsilon(1e-12));
  CHECK(r.bound == doctest::Approx(5.6).epsilon(1e-12));
  CHECK(r.value <= r.bound);
}

TEST_CASE("hard exit drops low-probability questions") {
  const ProbTable probs = Table({0.9, 0.4, 0.1});
  const ThresholdExitConfig cfg{ExitKind::kHard, 0.5, ExitMode::kRedistribute};
  const ThresholdExitResult r = ApplyThresholdExits(probs, 3, cfg);
  CHECK(r.eligible == std::vector<std::string>{"q0"});
  CHECK(r.alloc.extras == Extras{3, 0, 0});
  CHECK(r.saved_units == 0);
}

TEST_CASE("hard exit keeping two questions matches enumeration over them") {
  const ProbTable probs = Table({0.9, 0.4, 0.1});
  const ThresholdExitConfig cfg{ExitKind::kHard, 0.35, ExitMode::kRedistribute};
  const ThresholdExitResult r = ApplyThresholdExits(probs, 3, cfg);
  CHECK(r.eligible == std::vector<std::string>{"q0", "q1"});
  const Enumerated oracle = Enumerate({0.9, 0.4}, 3);
  REQUIRE(oracle.argmax.size() == 1);
  CHECK(oracle.argmax[0] == Extras{1, 2});
  CHECK(r.alloc.extras == Extras{1, 2, 0});
  CHECK(r.alloc.Allocated() == 3);
}

TEST_CASE("easy exit in skip mode shrinks the budget") {
  const ProbTable probs = Table({0.9, 0.4, 0.1});
  const ThresholdExitConfig cfg{ExitKind::kEasy, 0.7, ExitMode::kSkip};
  const ThresholdExitResult r = ApplyThresholdExits(probs, 3, cfg);
  CHECK(r.eligible == std::vector<std::string>{"q1", "q2"});
  CHECK(r.alloc.Allocated() == 2);
  CHECK(r.saved_units == 1);
  CHECK(r.alloc.Deficit() == 1);
  CHECK(r.alloc.extras[0] == 0);
}

TEST_CASE("disabled exit reduces to greedy") {
  const ProbTable probs = Table({0.9, 0.4, 0.1, 0.65});
  const ThresholdExitResult r = ApplyThresholdExits(probs, 9, ThresholdExitConfig{});
  CHECK(r.alloc.extras == GreedyAllocate(probs, 9).extras);
  CHECK(r.eligible == probs.ids());
  CHECK(r.saved_units == 0);
}

TEST_CASE("exits excluding every question") {
  const ProbTable probs = Table({0.1, 0.2});
  const ThresholdExitConfig skip{ExitKind::kHard, 0.5, ExitMode::kSkip};
  const ThresholdExitResult r = ApplyThresholdExits(probs, 4, skip);
  CHECK(r.eligible.empty());
  CHECK(r.alloc.extras == Extras{0, 0});
  CHECK(r.saved_units == 4);
  const ThresholdExitConfig redistribute{ExitKind::kHard, 0.5, ExitMode::kRedistribute};
  CHECK(ThrownCode([&] { ApplyThresholdExits(probs, 4, redistribute); }) ==
        ErrorCode::kNoEligibleQuestions);
}

TEST_CASE("threshold validation") {
  const ProbTable probs = Table({0.5});
  for (double theta : {0.0, 1.0, -0.5, 2.0}) {
    const ThresholdExitConfig cfg{ExitKind::kHard, theta, ExitMode::kSkip};
    CHECK(ThrownCode([&] { ApplyThresholdExits(probs, 1, cfg); }) == ErrorCode::kValidation);
  }
  CHECK(ParseExitKind("easy") == ExitKind::kEasy);
  CHECK(ParseExitMode("skip") == ExitMode::kSkip);
}

TEST_CASE("allocator properties on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const size_t m = 1 + t % 15;
    const int64_t b = (t * 7) % 80;
    Probs p(m);
    for (double& v : p) v = unit(rng);
    const Extras e = GreedyExtras(p, b);
    CHECK(std::accumulate(e.begin(), e.end(), int64_t{0}) == b);
    CHECK(std::all_of(e.begin(), e.end(), [](int64_t x) { return x >= 0; }));
    CHECK(e == GreedyExtrasScan(p, b));

    // Monotone in the budget.
    CHECK(CoverageObjective(GreedyExtras(p, b + 1), p) >= CoverageObjective(e, p));

    // Dominates uniform whenever uniform is feasible.
    if (b % static_cast<int64_t>(m) == 0) {
      const Extras uniform(m, b / static_cast<int64_t>(m));
      CHECK(CoverageObjective(e, p) >= CoverageObjective(uniform, p) - 1e-12);
    }

    // Permutation equivariance (values are distinct almost surely).
    std::vector<size_t> perm(m);
    std::iota(perm.begin(), perm.end(), size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Probs pp(m);
    for (size_t i = 0; i < m; ++i) pp[i] = p[perm[i]];
    const Extras ep = GreedyExtras(pp, b);
    for (size_t i = 0; i < m; ++i) CHECK(ep[i] == e[perm[i]]);
  }
}

TEST_CASE("equal probabilities give a balanced allocation") {
  for (double p : {0.05, 0.3, 0.5, 0.77, 0.999}) {
    for (int64_t m = 1; m <= 6; ++m) {
      const Extras e = GreedyExtras(Probs(static_cast<size_t>(m), p), 4 * m);
      CHECK(e == Extras(static_cast<size_t>(m), 4));
    }
  }
}

TEST_CASE("heap and scan agree on tie-heavy grids") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> grid(0, 10);
  for (int t = 0; t < 300; ++t) {
    Probs p(1 + t % 12);
    for (double& v : p) v = grid(rng) / 10.0;
    CHECK(GreedyExtras(p, t % 50) == GreedyExtrasScan(p, t % 50));
  }
}

TEST_CASE("very large temperature yields the uniform allocation") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> score(0.1, 3.0);
  for (int64_t m : {3, 10, 50}) {
    Probs p(static_cast<size_t>(m));
    for (double& v : p) v = ScoreToProb(score(rng), 1e9);
    CHECK(GreedyExtras(p, 3 * m) == Extras(static_cast<size_t>(m), 3));
  }
}

}  // namespace
}  // namespace uab
