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

#include "uab/coverage.h"

#include <cmath>
#include <string>

#include "uab/errors.h"

namespace uab {
namespace {

void CheckProbability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kValidation,
                "probability outside [0,1]: " + std::to_string(p));
  }
}

}  // namespace

double SurvivalPower(double p, int64_t n) {
  CheckProbability(p);
  if (n < 0) throw Error(ErrorCode::kValidation, "negative sample count");
  if (n == 0 || p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  return std::exp(static_cast<double>(n) * std::log1p(-p));
}

double MarginalGain(double p, int64_t n) { return p * SurvivalPower(p, n); }

double CoverageObjective(std::span<const int64_t> extras,
                         std::span<const double> probs) {
  if (extras.size() != probs.size()) {
    throw Error(ErrorCode::kValidation, "allocation and probability sizes differ");
  }
  double total = 0.0;
  for (size_t i = 0; i < extras.size(); ++i) {
    if (extras[i] < 0) {
      throw Error(ErrorCode::kValidation, "negative extra count");
    }
    total += AtLeastOneCorrect(probs[i], 1 + extras[i]);
  }
  return total;
}

double CoverageObjective(const AllocationVector& alloc, const ProbTable& probs) {
  double total = 0.0;
  for (size_t i = 0; i < alloc.size(); ++i) {
    const double p = probs.At(alloc.ids[i]);
    if (alloc.extras[i] < 0) {
      throw Error(ErrorCode::kValidation,
                  "negative extra count for '" + alloc.ids[i] + "'");
    }
    total += AtLeastOneCorrect(p, 1 + alloc.extras[i]);
  }
  return total;
}

}  // namespace uab
