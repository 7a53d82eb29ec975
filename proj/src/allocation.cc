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

#include "uab/allocation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "uab/coverage.h"
#include "uab/errors.h"

namespace uab {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void CheckInstance(std::span<const double> probs, int64_t budget_effective) {
  if (budget_effective < 0) {
    throw Error(ErrorCode::kValidation, "budget_effective must be >= 0");
  }
  if (probs.empty() && budget_effective > 0) {
    throw Error(ErrorCode::kEmptyInput,
                "cannot allocate a positive budget over zero questions");
  }
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kValidation,
                  "probability outside [0,1]: " + std::to_string(p));
    }
  }
}

// log of MarginalGain(p, 1 + extras); -inf when the gain is exactly zero.
// Working in log space keeps gains for p near 1 from underflowing.
double LogNextGain(double p, int64_t extras) {
  if (p == 0.0 || p == 1.0) return kNegInf;
  return std::log(p) + static_cast<double>(1 + extras) * std::log1p(-p);
}

void DealRoundRobin(std::vector<int64_t>& extras, int64_t units) {
  const auto m = static_cast<int64_t>(extras.size());
  for (int64_t i = 0; i < m; ++i) {
    extras[i] += units / m + (i < units % m ? 1 : 0);
  }
}

AllocationVector Wrap(const ProbTable& probs, std::vector<int64_t> extras,
                      int64_t budget_effective) {
  AllocationVector alloc;
  alloc.ids = probs.ids();
  alloc.extras = std::move(extras);
  alloc.budget_effective = budget_effective;
  return alloc;
}

void CheckSameIds(const ProbTable& a, const ProbTable& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kMismatchedIds, "probability tables differ in size");
  }
  for (size_t i = 0; i < a.size(); ++i) {
    if (!b.Find(a.id(i))) {
      throw Error(ErrorCode::kMismatchedIds,
                  "question '" + a.id(i) + "' missing from estimates");
    }
  }
}

double SupDistance(const ProbTable& a, const ProbTable& b) {
  double eps = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    eps = std::max(eps, std::abs(a.p(i) - b.At(a.id(i))));
  }
  return eps;
}

}  // namespace

std::vector<int64_t> GreedyExtras(std::span<const double> probs,
                                  int64_t budget_effective) {
  CheckInstance(probs, budget_effective);
  std::vector<int64_t> extras(probs.size(), 0);
  struct Entry {
    double key;
    size_t index;
  };
  // Max-heap on key; equal keys surface the lowest index first.
  auto lower_priority = [](const Entry& a, const Entry& b) {
    return a.key < b.key || (a.key == b.key && a.index > b.index);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> heap(
      lower_priority);
  for (size_t i = 0; i < probs.size(); ++i) {
    heap.push({LogNextGain(probs[i], 0), i});
  }
  for (int64_t t = 0; t < budget_effective; ++t) {
    Entry top = heap.top();
    if (top.key == kNegInf) {
      DealRoundRobin(extras, budget_effective - t);
      break;
    }
    heap.pop();
    ++extras[top.index];
    heap.push({LogNextGain(probs[top.index], extras[top.index]), top.index});
  }
  return extras;
}

std::vector<int64_t> GreedyExtrasScan(std::span<const double> probs,
                                      int64_t budget_effective) {
  CheckInstance(probs, budget_effective);
  std::vector<int64_t> extras(probs.size(), 0);
  for (int64_t t = 0; t < budget_effective; ++t) {
    size_t best = 0;
    double best_key = kNegInf;
    for (size_t i = 0; i < probs.size(); ++i) {
      const double key = LogNextGain(probs[i], extras[i]);
      if (key > best_key) {
        best_key = key;
        best = i;
      }
    }
    if (best_key == kNegInf) {
      DealRoundRobin(extras, budget_effective - t);
      break;
    }
    ++extras[best];
  }
  return extras;
}

AllocationVector GreedyAllocate(const ProbTable& probs, int64_t budget_effective) {
  return Wrap(probs, GreedyExtras(probs.values(), budget_effective),
              budget_effective);
}

std::vector<int64_t> DpExtrasExact(std::span<const double> probs,
                                   int64_t budget_effective) {
  CheckInstance(probs, budget_effective);
  if (probs.size() > kDpMaxQuestions || budget_effective > kDpMaxBudget) {
    throw Error(ErrorCode::kInstanceTooLarge,
                "exact DP is limited to " + std::to_string(kDpMaxQuestions) +
                    " questions and budget " + std::to_string(kDpMaxBudget) +
                    "; use GreedyAllocate");
  }
  const size_t m = probs.size();
  const auto width = static_cast<size_t>(budget_effective) + 1;
  // best[k][b]: max objective of the first k questions spending exactly b.
  std::vector<std::vector<double>> best(m + 1, std::vector<double>(width, kNegInf));
  std::vector<std::vector<int64_t>> choice(m + 1, std::vector<int64_t>(width, 0));
  best[0][0] = 0.0;
  for (size_t k = 1; k <= m; ++k) {
    for (size_t b = 0; b < width; ++b) {
      for (size_t n = 0; n <= b; ++n) {
        const double prev = best[k - 1][b - n];
        if (prev == kNegInf) continue;
        const double value =
            prev + AtLeastOneCorrect(probs[k - 1], 1 + static_cast<int64_t>(n));
        if (value > best[k][b]) {
          best[k][b] = value;
          choice[k][b] = static_cast<int64_t>(n);
        }
      }
    }
  }
  std::vector<int64_t> extras(m, 0);
  auto remaining = static_cast<size_t>(budget_effective);
  for (size_t k = m; k >= 1; --k) {
    extras[k - 1] = choice[k][remaining];
    remaining -= static_cast<size_t>(extras[k - 1]);
  }
  return extras;
}

AllocationVector DpAllocateExact(const ProbTable& probs, int64_t budget_effective) {
  return Wrap(probs, DpExtrasExact(probs.values(), budget_effective),
              budget_effective);
}

KktCertificate VerifyKkt(const AllocationVector& alloc, const ProbTable& probs,
                         double tolerance) {
  if (alloc.Allocated() != alloc.budget_effective) {
    throw Error(ErrorCode::kValidation,
                "KKT check requires an allocation that spends its budget");
  }
  KktCertificate cert;
  cert.lambda_star = kNegInf;
  double min_last = std::numeric_limits<double>::infinity();
  size_t receiver = 0;
  size_t donor = 0;
  for (size_t i = 0; i < alloc.size(); ++i) {
    const double p = probs.At(alloc.ids[i]);
    const int64_t e = alloc.extras[i];
    if (e < 0) throw Error(ErrorCode::kValidation, "negative extra count");
    const double next = MarginalGain(p, 1 + e);
    if (next > cert.lambda_star) {
      cert.lambda_star = next;
      receiver = i;
    }
    if (e > 0) {
      const double last = MarginalGain(p, e);
      if (last < min_last) {
        min_last = last;
        donor = i;
      }
    }
  }
  if (alloc.size() == 0) cert.lambda_star = 0.0;
  cert.slack = min_last - cert.lambda_star;
  cert.satisfied = cert.lambda_star <= min_last + tolerance;
  if (!cert.satisfied) {
    cert.violating_pair.emplace(alloc.ids[receiver], alloc.ids[donor]);
  }
  return cert;
}

bool LambdaInKktInterval(double lambda, const AllocationVector& alloc,
                         const ProbTable& probs, double tolerance) {
  for (size_t i = 0; i < alloc.size(); ++i) {
    const double p = probs.At(alloc.ids[i]);
    const int64_t e = alloc.extras[i];
    if (lambda < MarginalGain(p, 1 + e) - tolerance) return false;
    if (e > 0 && lambda > MarginalGain(p, e) + tolerance) return false;
  }
  return true;
}

BoundCheck SensitivityGap(const AllocationVector& alloc,
                          const ProbTable& probs_true,
                          const ProbTable& probs_est) {
  CheckSameIds(probs_true, probs_est);
  const double eps = SupDistance(probs_true, probs_est);
  const auto total = static_cast<double>(
      alloc.Allocated() + static_cast<int64_t>(alloc.size()));
  return {std::abs(CoverageObjective(alloc, probs_est) -
                   CoverageObjective(alloc, probs_true)),
          total * eps};
}

BoundCheck RegretBoundCheck(const ProbTable& probs_true,
                            const ProbTable& probs_est,
                            int64_t budget_effective) {
  CheckSameIds(probs_true, probs_est);
  const AllocationVector optimal = DpAllocateExact(probs_true, budget_effective);
  const AllocationVector greedy = GreedyAllocate(probs_est, budget_effective);
  const double eps = SupDistance(probs_true, probs_est);
  const auto total =
      static_cast<double>(budget_effective + static_cast<int64_t>(probs_true.size()));
  return {CoverageObjective(optimal, probs_true) -
              CoverageObjective(greedy, probs_true),
          2.0 * total * eps};
}

std::string_view ExitKindName(ExitKind kind) {
  switch (kind) {
    case ExitKind::kNone: return "none";
    case ExitKind::kHard: return "hard";
    case ExitKind::kEasy: return "easy";
  }
  return "none";
}

ExitKind ParseExitKind(std::string_view name) {
  if (name == "none") return ExitKind::kNone;
  if (name == "hard") return ExitKind::kHard;
  if (name == "easy") return ExitKind::kEasy;
  throw Error(ErrorCode::kValidation, "unknown exit kind '" + std::string(name) + "'");
}

std::string_view ExitModeName(ExitMode mode) {
  return mode == ExitMode::kRedistribute ? "redistribute" : "skip";
}

ExitMode ParseExitMode(std::string_view name) {
  if (name == "redistribute") return ExitMode::kRedistribute;
  if (name == "skip") return ExitMode::kSkip;
  throw Error(ErrorCode::kValidation, "unknown exit mode '" + std::string(name) + "'");
}

void ThresholdExitConfig::Validate() const {
  if (exit_kind != ExitKind::kNone && !(theta > 0.0 && theta < 1.0)) {
    throw Error(ErrorCode::kValidation, "theta must lie in (0,1)");
  }
}

ThresholdExitResult ApplyThresholdExits(const ProbTable& probs,
                                        int64_t budget_effective,
                                        const ThresholdExitConfig& cfg) {
  cfg.Validate();
  ThresholdExitResult result;
  if (cfg.exit_kind == ExitKind::kNone) {
    result.eligible = probs.ids();
    result.alloc = GreedyAllocate(probs, budget_effective);
    return result;
  }
  ProbTable eligible;
  std::vector<size_t> positions;
  for (size_t i = 0; i < probs.size(); ++i) {
    const bool dropped = cfg.exit_kind == ExitKind::kHard ? probs.p(i) < cfg.theta
                                                          : probs.p(i) > cfg.theta;
    if (!dropped) {
      eligible.Add(probs.id(i), probs.p(i));
      positions.push_back(i);
    }
  }
  result.eligible = eligible.ids();
  result.alloc = AllocationVector::Zeros(probs.ids(), budget_effective);
  if (eligible.empty()) {
    if (cfg.mode == ExitMode::kRedistribute && budget_effective > 0) {
      throw Error(ErrorCode::kNoEligibleQuestions,
                  "every question was excluded by the threshold exit");
    }
    result.saved_units = budget_effective;
    return result;
  }
  int64_t budget = budget_effective;
  if (cfg.mode == ExitMode::kSkip) {
    budget = budget_effective * static_cast<int64_t>(eligible.size()) /
             static_cast<int64_t>(probs.size());
  }
  const std::vector<int64_t> extras = GreedyExtras(eligible.values(), budget);
  for (size_t k = 0; k < positions.size(); ++k) {
    result.alloc.extras[positions[k]] = extras[k];
  }
  result.saved_units = budget_effective - budget;
  return result;
}

}  // namespace uab
