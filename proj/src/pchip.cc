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

#include "uab/pchip.h"

#include <algorithm>
#include <cmath>

#include "uab/errors.h"

namespace uab {

MonotoneCubicInterpolant::MonotoneCubicInterpolant(std::vector<double> xs,
                                                   std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  const size_t n = xs_.size();
  if (n < 2 || ys_.size() != n) {
    throw Error(ErrorCode::kValidation, "interpolation needs >= 2 (x, y) pairs");
  }
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i])) {
      throw Error(ErrorCode::kValidation, "non-finite interpolation point");
    }
    if (i > 0 && !(xs_[i] > xs_[i - 1])) {
      throw Error(ErrorCode::kValidation, "budgets must be strictly increasing");
    }
  }

  std::vector<double> secant(n - 1);
  for (size_t k = 0; k + 1 < n; ++k) {
    secant[k] = (ys_[k + 1] - ys_[k]) / (xs_[k + 1] - xs_[k]);
  }
  slopes_.assign(n, 0.0);
  slopes_[0] = secant[0];
  slopes_[n - 1] = secant[n - 2];
  for (size_t k = 1; k + 1 < n; ++k) {
    slopes_[k] = secant[k - 1] * secant[k] <= 0.0 ? 0.0 : 0.5 * (secant[k - 1] + secant[k]);
  }
  for (size_t k = 0; k + 1 < n; ++k) {
    if (secant[k] == 0.0) {
      slopes_[k] = 0.0;
      slopes_[k + 1] = 0.0;
      continue;
    }
    const double alpha = slopes_[k] / secant[k];
    const double beta = slopes_[k + 1] / secant[k];
    const double r2 = alpha * alpha + beta * beta;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      slopes_[k] = tau * alpha * secant[k];
      slopes_[k + 1] = tau * beta * secant[k];
    }
  }
}

double MonotoneCubicInterpolant::operator()(double x) const {
  if (!(x >= xs_.front() && x <= xs_.back())) {
    throw Error(ErrorCode::kValidation, "x outside the interpolation range");
  }
  size_t k = static_cast<size_t>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
  k = std::clamp<size_t>(k, 1, xs_.size() - 1) - 1;
  const double h = xs_[k + 1] - xs_[k];
  const double t = (x - xs_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * ys_[k] + h10 * h * slopes_[k] + h01 * ys_[k + 1] + h11 * h * slopes_[k + 1];
}

std::vector<BudgetAtTarget> MinBudgetCurve(std::span<const std::pair<double, double>> points,
                                           std::span<const double> targets) {
  std::vector<double> xs, ys;
  for (const auto& [x, y] : points) {
    xs.push_back(x);
    ys.push_back(y);
  }
  const MonotoneCubicInterpolant f(xs, ys);
  const size_t peak =
      static_cast<size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());

  std::vector<BudgetAtTarget> out;
  for (double target : targets) {
    BudgetAtTarget row{target, std::nullopt};
    if (ys[0] >= target) {
      row.min_budget = xs[0];
    }
    for (size_t k = 0; !row.min_budget && k < peak; ++k) {
      // Each segment is monotone, so its extremes sit at the knots. A segment
      // whose right knot falls short cannot reach the target.
      if (ys[k + 1] < target) continue;
      if (ys[k + 1] == target) {
        row.min_budget = xs[k + 1];
        break;
      }
      double lo = xs[k], hi = xs[k + 1];
      while (hi - lo > 0.01 * kInversionTolerance) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) >= target ? hi : lo) = mid;
      }
      row.min_budget = hi;
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace uab
