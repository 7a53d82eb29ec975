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

#ifndef UAB_ALLOCATION_H_
#define UAB_ALLOCATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uab/types.h"

namespace uab {

// Marginal-greedy allocation of `budget_effective` extra samples maximizing
// sum_i 1 - (1 - p_i)^(1 + e_i). Each unit goes to the question whose next
// sample has the largest gain; ties go to the lowest index. Once every gain is
// exactly zero the remaining units are dealt round-robin from index 0.
// Runs in O(B log M) with a heap.
AllocationVector GreedyAllocate(const ProbTable& probs, int64_t budget_effective);
std::vector<int64_t> GreedyExtras(std::span<const double> probs,
                                  int64_t budget_effective);

// Same contract as GreedyAllocate, implemented as a plain O(B M) argmax scan.
// Kept as a reference for the heap version.
std::vector<int64_t> GreedyExtrasScan(std::span<const double> probs,
                                      int64_t budget_effective);

inline constexpr size_t kDpMaxQuestions = 12;
inline constexpr int64_t kDpMaxBudget = 64;

// Exact maximizer by dynamic programming over (question prefix, budget spent).
// Throws kInstanceTooLarge beyond kDpMaxQuestions or kDpMaxBudget.
AllocationVector DpAllocateExact(const ProbTable& probs, int64_t budget_effective);
std::vector<int64_t> DpExtrasExact(std::span<const double> probs,
                                   int64_t budget_effective);

inline constexpr double kKktTolerance = 1e-12;

// Discrete optimality certificate. With g_i(n) = p_i (1 - p_i)^n and N_i =
// 1 + e_i, the allocation is optimal iff some lambda satisfies
// g_i(N_i - 1) >= lambda >= g_i(N_i) for all i (left side vacuous at e_i == 0).
struct KktCertificate {
  // Largest next-unit gain, max_i g_i(N_i).
  double lambda_star = 0.0;
  bool satisfied = false;
  // min_{e_j > 0} g_j(N_j - 1) - lambda_star; +inf when no question has extras.
  double slack = 0.0;
  // (receiver, donor): moving one unit from donor to receiver raises the
  // objective.
  std::optional<std::pair<std::string, std::string>> violating_pair;
};

KktCertificate VerifyKkt(const AllocationVector& alloc, const ProbTable& probs,
                         double tolerance = kKktTolerance);

// True when lambda lies in every question's closed KKT interval.
bool LambdaInKktInterval(double lambda, const AllocationVector& alloc,
                         const ProbTable& probs,
                         double tolerance = kKktTolerance);

struct BoundCheck {
  double value = 0.0;
  double bound = 0.0;
};

// |J(alloc; est) - J(alloc; true)| against B * ||est - true||_inf, where B
// counts every sample including Phase 1. Id sets must match (kMismatchedIds).
BoundCheck SensitivityGap(const AllocationVector& alloc,
                          const ProbTable& probs_true,
                          const ProbTable& probs_est);

// Regret of the greedy allocation under estimates, measured under the true
// probabilities against the DP optimum, with bound 2 B ||est - true||_inf.
BoundCheck RegretBoundCheck(const ProbTable& probs_true,
                            const ProbTable& probs_est,
                            int64_t budget_effective);

enum class ExitKind { kNone, kHard, kEasy };
enum class ExitMode { kRedistribute, kSkip };

std::string_view ExitKindName(ExitKind kind);
ExitKind ParseExitKind(std::string_view name);
std::string_view ExitModeName(ExitMode mode);
ExitMode ParseExitMode(std::string_view name);

struct ThresholdExitConfig {
  ExitKind exit_kind = ExitKind::kNone;
  double theta = 0.5;
  ExitMode mode = ExitMode::kRedistribute;

  void Validate() const;
};

struct ThresholdExitResult {
  std::vector<std::string> eligible;
  AllocationVector alloc;
  int64_t saved_units = 0;
};

// Hard exits drop questions with p < theta, easy exits drop p > theta; dropped
// questions keep only their Phase-1 sample. Redistribute spends the full
// budget on the survivors; skip spends floor(B * eligible / M) and reports the
// rest as saved.
ThresholdExitResult ApplyThresholdExits(const ProbTable& probs,
                                        int64_t budget_effective,
                                        const ThresholdExitConfig& cfg);

}  // namespace uab

#endif  // UAB_ALLOCATION_H_
