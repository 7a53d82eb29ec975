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

#ifndef UAB_PCHIP_H_
#define UAB_PCHIP_H_

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace uab {

// Monotonicity-preserving piecewise cubic Hermite interpolant with
// Fritsch-Carlson slopes: three-point secant averages, zeroed at local
// extrema and flat segments, and rescaled onto the alpha^2 + beta^2 <= 9 disc.
class MonotoneCubicInterpolant {
 public:
  // Throws kValidation unless xs is strictly increasing with >= 2 points and
  // every value is finite.
  MonotoneCubicInterpolant(std::vector<double> xs, std::vector<double> ys);

  // Defined on [xs.front(), xs.back()]; throws kValidation outside.
  double operator()(double x) const;

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const std::vector<double>& slopes() const { return slopes_; }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> slopes_;
};

inline constexpr double kInversionTolerance = 1e-6;

struct BudgetAtTarget {
  double target = 0.0;
  // Smallest budget reaching the target; absent above the curve's peak.
  std::optional<double> min_budget;
};

// Inverts an accuracy-vs-budget curve. Only [N_min, N_peak] is searched, where
// N_peak is the first knot attaining the maximum accuracy. A target equal to
// a knot value returns that knot exactly; otherwise the crossing segment is
// bisected to kInversionTolerance.
std::vector<BudgetAtTarget> MinBudgetCurve(std::span<const std::pair<double, double>> points,
                                           std::span<const double> targets);

}  // namespace uab

#endif  // UAB_PCHIP_H_
