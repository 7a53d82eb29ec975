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

#include "uab/verify.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "uab/allocation.h"
#include "uab/coverage.h"
#include "uab/rng.h"
#include "uab/signals.h"
#include "uab/simulated_backend.h"

namespace uab {
namespace {

constexpr double kObjectiveTolerance = 1e-12;
constexpr double kBoundSlack = 1e-12;
constexpr double kSimInversionTolerance = 1e-9;

class Timer {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ExtrasAllocator OrDefault(const ExtrasAllocator& allocator) {
  if (allocator) return allocator;
  return [](std::span<const double> p, int64_t b) { return GreedyExtras(p, b); };
}

bool Conserves(std::span<const int64_t> extras, size_t m, int64_t budget) {
  if (extras.size() != m) return false;
  if (std::any_of(extras.begin(), extras.end(), [](int64_t e) { return e < 0; })) {
    return false;
  }
  return std::accumulate(extras.begin(), extras.end(), int64_t{0}) == budget;
}

std::string Describe(std::span<const double> p, int64_t budget) {
  std::string s = "p=(";
  for (size_t i = 0; i < p.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%.6g", i ? "," : "", p[i]);
    s += buf;
  }
  return s + ") B=" + std::to_string(budget);
}

std::vector<double> RandomProbs(Rng& rng, size_t m) {
  std::vector<double> p(m);
  for (double& v : p) v = Uniform01(rng);
  return p;
}

int64_t RandomInt(Rng& rng, int64_t lo, int64_t hi) {
  return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
}

// Estimates within eps of the truth in sup norm, clamped to [0, 1].
std::vector<double> Perturb(Rng& rng, std::span<const double> truth, double eps) {
  std::vector<double> est(truth.begin(), truth.end());
  std::uniform_real_distribution<double> noise(-eps, eps);
  for (double& v : est) v = std::clamp(v + noise(rng), 0.0, 1.0);
  return est;
}

void RecordWorst(VerifyCheck& check, double value, bool larger_is_worse,
                 const std::string& label) {
  const bool first = check.worst_label.empty();
  if (first || (larger_is_worse ? value > check.worst : value < check.worst)) {
    check.worst = value;
    check.worst_label = label;
  }
}

}  // namespace

VerifyCheck CheckOracleEquivalence(const ExtrasAllocator& allocator_in, int64_t max_m,
                                   int64_t max_budget, uint64_t seed) {
  const ExtrasAllocator allocator = OrDefault(allocator_in);
  VerifyCheck check;
  check.name = "oracle_equivalence";
  Timer timer;
  Rng rng(StreamSeed({seed, 0x0E1}));
  for (int64_t m = 1; m <= max_m; ++m) {
    std::vector<int> grid(static_cast<size_t>(m), 0);
    while (true) {
      std::vector<double> p(grid.size());
      for (size_t i = 0; i < grid.size(); ++i) p[i] = grid[i] / 10.0;
      std::shuffle(p.begin(), p.end(), rng);
      for (int64_t b = 0; b <= max_budget; ++b) {
        ++check.instances;
        const std::vector<int64_t> got = allocator(p, b);
        const double j_dp = CoverageObjective(DpExtrasExact(p, b), p);
        double err = std::numeric_limits<double>::infinity();
        if (Conserves(got, p.size(), b)) err = std::abs(CoverageObjective(got, p) - j_dp);
        if (err > kObjectiveTolerance) ++check.failures;
        RecordWorst(check, err, true, Describe(p, b));
      }
      // Next nondecreasing index tuple over 0..10.
      int pos = static_cast<int>(m) - 1;
      while (pos >= 0 && grid[pos] == 10) --pos;
      if (pos < 0) break;
      ++grid[pos];
      for (size_t i = static_cast<size_t>(pos) + 1; i < grid.size(); ++i) grid[i] = grid[pos];
    }
  }
  check.seconds = timer.Seconds();
  return check;
}

VerifyCheck CheckKktRandom(const ExtrasAllocator& allocator_in, int64_t instances,
                           uint64_t seed) {
  const ExtrasAllocator allocator = OrDefault(allocator_in);
  VerifyCheck check;
  check.name = "kkt_certificate";
  Timer timer;
  Rng rng(StreamSeed({seed, 0x0E2}));
  for (int64_t t = 0; t < instances; ++t) {
    const auto m = static_cast<size_t>(RandomInt(rng, 1, 50));
    const int64_t b = RandomInt(rng, 0, 200);
    const std::vector<double> p = RandomProbs(rng, m);
    const ProbTable probs = ProbTable::FromValues(p);
    ++check.instances;
    const std::vector<int64_t> extras = allocator(p, b);
    if (!Conserves(extras, m, b)) {
      ++check.failures;
      RecordWorst(check, -std::numeric_limits<double>::infinity(), false,
                  "budget not conserved: " + Describe(p, b));
      continue;
    }
    const AllocationVector alloc{probs.ids(), extras, b};
    const KktCertificate cert = VerifyKkt(alloc, probs);
    if (!cert.satisfied || !LambdaInKktInterval(cert.lambda_star, alloc, probs)) {
      ++check.failures;
    }
    RecordWorst(check, cert.slack, false, "M=" + std::to_string(m) + " B=" + std::to_string(b));
  }
  check.seconds = timer.Seconds();
  return check;
}

VerifyCheck CheckMatchesScan(const ExtrasAllocator& allocator_in, int64_t instances,
                             uint64_t seed) {
  const ExtrasAllocator allocator = OrDefault(allocator_in);
  VerifyCheck check;
  check.name = "heap_matches_scan";
  Timer timer;
  Rng rng(StreamSeed({seed, 0x0E3}));
  for (int64_t t = 0; t < instances; ++t) {
    const auto m = static_cast<size_t>(RandomInt(rng, 1, 30));
    const int64_t b = RandomInt(rng, 0, 100);
    std::vector<double> p(m);
    const bool grid = t % 2 == 0;
    for (double& v : p) v = grid ? static_cast<double>(RandomInt(rng, 0, 10)) / 10.0 : Uniform01(rng);
    ++check.instances;
    const bool same = allocator(p, b) == GreedyExtrasScan(p, b);
    if (!same) {
      ++check.failures;
      if (check.worst_label.empty()) check.worst_label = Describe(p, b);
    }
  }
  check.worst = static_cast<double>(check.failures);
  check.seconds = timer.Seconds();
  return check;
}

VerifyCheck CheckSensitivityBound(const ExtrasAllocator& allocator_in, int64_t trials,
                                  double eps, uint64_t seed) {
  const ExtrasAllocator allocator = OrDefault(allocator_in);
  char name[64];
  std::snprintf(name, sizeof(name), "sensitivity_bound eps=%g", eps);
  VerifyCheck check;
  check.name = name;
  Timer timer;
  Rng rng(StreamSeed({seed, 0x0E4, static_cast<uint64_t>(eps * 1e6)}));
  for (int64_t t = 0; t < trials; ++t) {
    const auto m = static_cast<size_t>(RandomInt(rng, 1, 20));
    const int64_t b = RandomInt(rng, 0, 40);
    const std::vector<double> truth = RandomProbs(rng, m);
    const std::vector<double> est = Perturb(rng, truth, eps);
    const ProbTable p_true = ProbTable::FromValues(truth);
    const ProbTable p_est = ProbTable::FromValues(est);
    ++check.instances;
    std::vector<int64_t> extras = allocator(est, b);
    if (!Conserves(extras, m, b)) {
      ++check.failures;
      continue;
    }
    const BoundCheck gap = SensitivityGap({p_true.ids(), extras, b}, p_true, p_est);
    // Independent of the measured sup norm: the bound must also hold at B eps.
    const double b_total = static_cast<double>(b) + static_cast<double>(m);
    if (gap.value > gap.bound + kBoundSlack || gap.value > b_total * eps + kBoundSlack) {
      ++check.failures;
    }
    RecordWorst(check, gap.bound > 0 ? gap.value / gap.bound : 0.0, true, Describe(est, b));
  }
  check.seconds = timer.Seconds();
  return check;
}

VerifyCheck CheckRegretBound(const ExtrasAllocator& allocator_in, int64_t trials, double eps,
                             uint64_t seed) {
  const ExtrasAllocator allocator = OrDefault(allocator_in);
  char name[64];
  std::snprintf(name, sizeof(name), "regret_bound eps=%g", eps);
  VerifyCheck check;
  check.name = name;
  Timer timer;
  Rng rng(StreamSeed({seed, 0x0E5, static_cast<uint64_t>(eps * 1e6)}));
  for (int64_t t = 0; t < trials; ++t) {
    const auto m = static_cast<size_t>(RandomInt(rng, 1, 8));
    const int64_t b = RandomInt(rng, 0, 24);
    const std::vector<double> truth = RandomProbs(rng, m);
    const std::vector<double> est = Perturb(rng, truth, eps);
    ++check.instances;
    std::vector<int64_t> extras = allocator(est, b);
    if (!Conserves(extras, m, b)) {
      ++check.failures;
      continue;
    }
    double sup = 0.0;
    for (size_t i = 0; i < m; ++i) sup = std::max(sup, std::abs(est[i] - truth[i]));
    const double b_total = static_cast<double>(b) + static_cast<double>(m);
    const double regret =
        CoverageObjective(DpExtrasExact(truth, b), truth) - CoverageObjective(extras, truth);
    const double bound = 2.0 * b_total * sup;
    if (regret < -kBoundSlack || regret > bound + kBoundSlack) ++check.failures;
    RecordWorst(check, bound > 0 ? regret / bound : 0.0, true, Describe(est, b));
  }
  check.seconds = timer.Seconds();
  return check;
}

VerifyCheck CheckTelescoping(int64_t instances, uint64_t seed) {
  VerifyCheck check;
  check.name = "telescoping";
  Timer timer;
  Rng rng(StreamSeed({seed, 0x0E6}));
  for (int64_t t = 0; t < instances; ++t) {
    const auto m = static_cast<size_t>(RandomInt(rng, 1, 20));
    std::vector<double> p = RandomProbs(rng, m);
    // Exercise the exact boundary values too.
    if (t % 5 == 0) p[0] = static_cast<double>(RandomInt(rng, 0, 1));
    std::vector<int64_t> e(m);
    for (auto& v : e) v = RandomInt(rng, 0, 10);
    const double base = CoverageObjective(e, p);
    for (size_t i = 0; i < m; ++i) {
      ++check.instances;
      const double gain = MarginalGain(p[i], 1 + e[i]);
      ++e[i];
      const double err = std::abs(CoverageObjective(e, p) - base - gain);
      --e[i];
      if (err > kObjectiveTolerance) ++check.failures;
      RecordWorst(check, err, true, Describe(p, 0));
    }
  }
  check.seconds = timer.Seconds();
  return check;
}

VerifyCheck CheckSimulatorInversion(int64_t questions, uint64_t seed) {
  VerifyCheck check;
  check.name = "simulator_inversion";
  Timer timer;
  WorldConfig config;
  config.m_questions = questions;
  config.prob_law = BetaLaw{2.0, 2.0};
  config.signal_noise_sigma = 0.0;
  config.rng_seed = seed;
  const SimulatedWorld world = SimulatedWorld::Build(config);
  SimulatedBackend backend(world, seed);
  for (size_t i = 0; i < world.questions.size(); ++i) {
    const auto records =
        backend.SimulateSamples(world.questions[i].id, 4, 0, Phase::kPhase1);
    const double floor_p = std::max(world.true_probs[i], kSimProbFloor);
    for (const auto& r : records) {
      ++check.instances;
      const double recovered = ScoreToProb(Anll(r.token_logprobs), config.world_temperature);
      const double err = std::abs(recovered - floor_p);
      if (err > kSimInversionTolerance) ++check.failures;
      RecordWorst(check, err, true, world.questions[i].id);
    }
  }
  check.seconds = timer.Seconds();
  return check;
}

std::vector<VerifyCheck> RunVerifySuite(const VerifyOptions& options) {
  const ExtrasAllocator allocator = OrDefault(options.allocator);
  const uint64_t seed = options.seed;
  std::vector<VerifyCheck> checks;
  checks.push_back(CheckOracleEquivalence(allocator, 6, 12, seed));
  checks.push_back(CheckMatchesScan(allocator, 500, seed));
  checks.push_back(CheckKktRandom(allocator, 1000, seed));
  for (double eps : {0.01, 0.05, 0.1}) {
    checks.push_back(CheckSensitivityBound(allocator, 1000, eps, seed));
    checks.push_back(CheckRegretBound(allocator, 500, eps, seed));
  }
  checks.push_back(CheckTelescoping(1000, seed));
  checks.push_back(CheckSimulatorInversion(500, seed));
  return checks;
}

std::string FormatVerifyReport(std::span<const VerifyCheck> checks) {
  std::string out;
  for (const auto& c : checks) {
    char line[512];
    std::snprintf(line, sizeof(line), "%s %-26s instances=%-7lld failures=%-5lld worst=%.3e (%.2fs)",
                  c.passed() ? "PASS" : "FAIL", c.name.c_str(),
                  static_cast<long long>(c.instances), static_cast<long long>(c.failures),
                  c.worst, c.seconds);
    out += line;
    if (!c.passed() && !c.worst_label.empty()) out += " at " + c.worst_label;
    out += '\n';
  }
  return out;
}

}  // namespace uab
