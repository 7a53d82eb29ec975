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

#ifndef UAB_METRICS_H_
#define UAB_METRICS_H_

#include <array>
#include <cstdint>
#include <span>

namespace uab {

// Pearson correlation. Throws kValidation on unequal or short inputs and
// kUndefinedCorrelation when either side has zero variance.
double PearsonR(std::span<const double> x, std::span<const double> y);

double Mean(std::span<const double> values);
// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double SampleStd(std::span<const double> values);

struct DecileAllocation {
  std::array<double, 10> mean_extras{};
  std::array<int64_t, 10> counts{};
};

// Buckets questions into ten equal-count groups by ascending `difficulty`
// (stable on ties) and averages their extras. Decile d holds sorted positions
// [d M / 10, (d + 1) M / 10), so some deciles are empty when M < 10.
DecileAllocation AllocationByDecile(std::span<const double> difficulty,
                                    std::span<const int64_t> extras);

}  // namespace uab

#endif  // UAB_METRICS_H_
