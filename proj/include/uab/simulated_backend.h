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

#ifndef UAB_SIMULATED_BACKEND_H_
#define UAB_SIMULATED_BACKEND_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "uab/backend.h"
#include "uab/types.h"

namespace uab {

struct BetaLaw {
  double a = 2.0;
  double b = 2.0;
};
struct FixedListLaw {
  std::vector<double> probs;
};
struct TwoPointLaw {
  double p_lo = 0.2;
  double p_hi = 0.9;
  // Fraction of questions drawn at p_hi.
  double frac = 0.5;
};
using ProbLaw = std::variant<BetaLaw, FixedListLaw, TwoPointLaw>;

// "beta(a,b)", "fixed(p1,p2,...)", "two_point(lo,hi,frac)".
ProbLaw ParseProbLaw(std::string_view text);
std::string FormatProbLaw(const ProbLaw& law);

struct WorldConfig {
  int64_t m_questions = 100;
  ProbLaw prob_law = BetaLaw{};
  int64_t n_distractors = 3;
  double signal_noise_sigma = 0.0;
  double correlation_rho = 0.0;
  double world_temperature = 0.2;
  uint64_t rng_seed = 0;

  void Validate() const;
};

// Synthesized generations carry this many tokens each.
inline constexpr int64_t kSimTokenCount = 8;
// Floor applied to noisy probabilities before taking logs.
inline constexpr double kSimProbFloor = 1e-6;

struct SimulatedWorld {
  WorldConfig config;
  std::vector<QuestionRecord> questions;
  std::vector<double> true_probs;

  static SimulatedWorld Build(const WorldConfig& config);
};

// Deterministic Bernoulli world. Sample s of question q is correct with
// probability p*_q; with probability rho a question instead shares a single
// latent outcome across all its samples. Each (question, sample) pair draws
// from its own RNG stream keyed by `sampling_seed`, so output does not depend
// on request batching or call order.
class SimulatedBackend : public Backend {
 public:
  SimulatedBackend(const SimulatedWorld& world, uint64_t sampling_seed);

  BackendResponse Generate(const BackendRequest& request) override;
  std::string Endpoint() const override;
  std::string Model() const override { return "bernoulli-world"; }

  // Convenience wrapper producing pipeline records directly.
  std::vector<GenerationRecord> SimulateSamples(std::string_view question_id,
                                                int64_t n, int64_t first_index,
                                                Phase phase);

  double TrueProb(std::string_view question_id) const;

 private:
  BackendSample MakeSample(size_t question, int64_t sample_index,
                           std::string_view prompt, bool want_logprobs) const;

  const SimulatedWorld& world_;
  uint64_t sampling_seed_;
  std::unordered_map<std::string, size_t> index_;
};

}  // namespace uab

#endif  // UAB_SIMULATED_BACKEND_H_
