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

#ifndef UAB_COVERAGE_H_
#define UAB_COVERAGE_H_

#include <cstdint>
#include <span>

#include "uab/types.h"

namespace uab {

// (1 - p)^n with exact boundary values: 1 for n == 0 or p == 0, and 0 for
// p == 1 once n >= 1.
double SurvivalPower(double p, int64_t n);

// Probability that at least one of n i.i.d. samples is correct.
inline double AtLeastOneCorrect(double p, int64_t n) {
  return 1.0 - SurvivalPower(p, n);
}

// Gain from raising a question's sample count from n to n + 1:
// p * (1 - p)^n. With the Phase-1 sample counted, the next extra unit on a
// question holding e extras is MarginalGain(p, 1 + e).
double MarginalGain(double p, int64_t n);

// Sum over questions of 1 - (1 - p_i)^(1 + e_i). Looks up each allocated id
// in `probs`; a missing id raises kMissingProbability naming it.
double CoverageObjective(const AllocationVector& alloc, const ProbTable& probs);

// Index-aligned form used on hot paths. Sizes must agree.
double CoverageObjective(std::span<const int64_t> extras,
                         std::span<const double> probs);

}  // namespace uab

#endif  // UAB_COVERAGE_H_
