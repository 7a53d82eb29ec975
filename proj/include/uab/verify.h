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

#ifndef UAB_VERIFY_H_
#define UAB_VERIFY_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace uab {

// Signature shared by GreedyExtras and the alternatives the suite is run
// against (scan reference, deliberately broken variants).
using ExtrasAllocator =
    std::function<std::vector<int64_t>(std::span<const double>, int64_t)>;

struct VerifyCheck {
  std::string name;
  int64_t instances = 0;
  int64_t failures = 0;
  // Largest observed error or smallest slack, depending on the check.
  double worst = 0.0;
  std::string worst_label;
  double seconds = 0.0;

  bool passed() const { return failures == 0 && instances > 0; }
};

struct VerifyOptions {
  ExtrasAllocator allocator;  // defaults to GreedyExtras when empty
  uint64_t seed = 0;
};

// Exhaustive over multisets of {0, 0.1, ..., 1} for M = 1..max_m (each in a
// seeded random order) and B_eff = 0..max_budget. Compares J with the DP
// optimum to 1e-12 and checks budget conservation.
VerifyCheck CheckOracleEquivalence(const ExtrasAllocator& allocator, int64_t max_m,
                                   int64_t max_budget, uint64_t seed);

// Random instances with M <= 50, B_eff <= 200, p ~ U[0, 1]. Every certificate
// must be satisfied and its lambda* inside each question's interval. `worst`
// is the smallest slack seen.
VerifyCheck CheckKktRandom(const ExtrasAllocator& allocator, int64_t instances,
                           uint64_t seed);

// Output identical to the plain scan, on instances rich in ties.
VerifyCheck CheckMatchesScan(const ExtrasAllocator& allocator, int64_t instances,
                             uint64_t seed);

// gap <= B eps on random allocations of estimated probabilities with
// ||est - true||_inf <= eps. `worst` is the largest gap / bound.
VerifyCheck CheckSensitivityBound(const ExtrasAllocator& allocator, int64_t trials,
                                  double eps, uint64_t seed);

// 0 <= regret <= 2 B eps with the DP optimum under true probabilities.
VerifyCheck CheckRegretBound(const ExtrasAllocator& allocator, int64_t trials, double eps,
                             uint64_t seed);

// J(e + unit_i) - J(e) equals MarginalGain(p_i, 1 + e_i) to 1e-12.
VerifyCheck CheckTelescoping(int64_t instances, uint64_t seed);

// A noiseless simulated world maps every sample's ANLL back to p* to 1e-9.
VerifyCheck CheckSimulatorInversion(int64_t questions, uint64_t seed);

std::vector<VerifyCheck> RunVerifySuite(const VerifyOptions& options = {});

// One line per check: PASS|FAIL, name, instances, failures, worst, seconds.
std::string FormatVerifyReport(std::span<const VerifyCheck> checks);

}  // namespace uab

#endif  // UAB_VERIFY_H_
