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

#include "uab/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "uab/errors.h"

namespace uab {

double PearsonR(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kValidation, "pearson needs two equal-length series of >= 2");
  }
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kUndefinedCorrelation, "zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double Mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "mean of nothing");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double SampleStd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

DecileAllocation AllocationByDecile(std::span<const double> difficulty,
                                    std::span<const int64_t> extras) {
  if (difficulty.size() != extras.size()) {
    throw Error(ErrorCode::kValidation, "difficulty and extras sizes differ");
  }
  const size_t m = difficulty.size();
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return difficulty[a] < difficulty[b]; });
  DecileAllocation out;
  std::array<int64_t, 10> sums{};
  for (size_t pos = 0; pos < m; ++pos) {
    const size_t d = pos * 10 / m;
    sums[d] += extras[order[pos]];
    ++out.counts[d];
  }
  for (size_t d = 0; d < 10; ++d) {
    if (out.counts[d] > 0) {
      out.mean_extras[d] = static_cast<double>(sums[d]) / static_cast<double>(out.counts[d]);
    }
  }
  return out;
}

}  // namespace uab
