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

#include "uab/simulated_backend.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uab/answers.h"
#include "uab/errors.h"
#include "uab/judge.h"
#include "uab/rng.h"
#include "uab/signals.h"

namespace uab {
namespace {

// Stream tags separating the draws made for one question.
constexpr uint64_t kTagWorld = 1;
constexpr uint64_t kTagShared = 2;
constexpr uint64_t kTagSample = 3;

std::vector<double> ParseArgs(std::string_view text, std::string_view name) {
  const size_t open = text.find('(');
  const size_t close = text.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos ||
      close < open) {
    throw Error(ErrorCode::kConfig, "malformed " + std::string(name) + " law '" +
                                        std::string(text) + "'");
  }
  std::vector<double> args;
  std::stringstream ss(std::string(text.substr(open + 1, close - open - 1)));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      args.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, "bad number '" + item + "' in " +
                                          std::string(text));
    }
  }
  return args;
}

double DrawBeta(Rng& rng, double a, double b) {
  const double x = std::gamma_distribution<double>(a, 1.0)(rng);
  const double y = std::gamma_distribution<double>(b, 1.0)(rng);
  return x + y > 0.0 ? x / (x + y) : 0.5;
}

std::string FormatDouble(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ProbLaw ParseProbLaw(std::string_view text) {
  if (text.starts_with("beta")) {
    auto args = ParseArgs(text, "beta");
    if (args.size() != 2 || !(args[0] > 0) || !(args[1] > 0)) {
      throw Error(ErrorCode::kConfig, "beta law needs two positive parameters");
    }
    return BetaLaw{args[0], args[1]};
  }
  if (text.starts_with("fixed")) {
    auto args = ParseArgs(text, "fixed");
    if (args.empty()) throw Error(ErrorCode::kConfig, "fixed law needs values");
    return FixedListLaw{std::move(args)};
  }
  if (text.starts_with("two_point")) {
    auto args = ParseArgs(text, "two_point");
    if (args.size() != 3) {
      throw Error(ErrorCode::kConfig, "two_point law needs (p_lo,p_hi,frac)");
    }
    return TwoPointLaw{args[0], args[1], args[2]};
  }
  throw Error(ErrorCode::kConfig, "unknown probability law '" + std::string(text) + "'");
}

std::string FormatProbLaw(const ProbLaw& law) {
  if (const auto* beta = std::get_if<BetaLaw>(&law)) {
    return "beta(" + FormatDouble(beta->a) + "," + FormatDouble(beta->b) + ")";
  }
  if (const auto* two = std::get_if<TwoPointLaw>(&law)) {
    return "two_point(" + FormatDouble(two->p_lo) + "," + FormatDouble(two->p_hi) +
           "," + FormatDouble(two->frac) + ")";
  }
  std::string out = "fixed(";
  const auto& probs = std::get<FixedListLaw>(law).probs;
  for (size_t i = 0; i < probs.size(); ++i) {
    out += (i ? "," : "") + FormatDouble(probs[i]);
  }
  return out + ")";
}

void WorldConfig::Validate() const {
  if (m_questions < 1) throw Error(ErrorCode::kConfig, "world needs >= 1 question");
  if (n_distractors < 1) throw Error(ErrorCode::kConfig, "n_distractors must be >= 1");
  if (!(signal_noise_sigma >= 0.0)) {
    throw Error(ErrorCode::kConfig, "signal_noise_sigma must be >= 0");
  }
  if (!(correlation_rho >= 0.0 && correlation_rho <= 1.0)) {
    throw Error(ErrorCode::kConfig, "correlation_rho must lie in [0,1]");
  }
  if (!(world_temperature > 0.0)) {
    throw Error(ErrorCode::kConfig, "world_temperature must be > 0");
  }
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (const auto* fixed = std::get_if<FixedListLaw>(&prob_law)) {
    if (!std::all_of(fixed->probs.begin(), fixed->probs.end(), in_unit)) {
      throw Error(ErrorCode::kConfig, "fixed probabilities must lie in [0,1]");
    }
  }
  if (const auto* two = std::get_if<TwoPointLaw>(&prob_law)) {
    if (!in_unit(two->p_lo) || !in_unit(two->p_hi) || !in_unit(two->frac)) {
      throw Error(ErrorCode::kConfig, "two_point parameters must lie in [0,1]");
    }
  }
}

SimulatedWorld SimulatedWorld::Build(const WorldConfig& config) {
  config.Validate();
  SimulatedWorld world;
  world.config = config;
  for (int64_t i = 0; i < config.m_questions; ++i) {
    Rng rng(StreamSeed({config.rng_seed, kTagWorld, static_cast<uint64_t>(i)}));
    double p = 0.0;
    if (const auto* beta = std::get_if<BetaLaw>(&config.prob_law)) {
      p = DrawBeta(rng, beta->a, beta->b);
    } else if (const auto* fixed = std::get_if<FixedListLaw>(&config.prob_law)) {
      p = fixed->probs[static_cast<size_t>(i) % fixed->probs.size()];
    } else {
      const auto& two = std::get<TwoPointLaw>(config.prob_law);
      p = Uniform01(rng) < two.frac ? two.p_hi : two.p_lo;
    }
    // Harder questions get somewhat longer prompts so prompt length carries
    // a weak difficulty signal.
    const auto padding = static_cast<size_t>(
        std::max(0.0, 40.0 + 120.0 * (1.0 - p) + 80.0 * (Uniform01(rng) - 0.5)));
    std::string id = "q" + std::to_string(i);
    std::string prompt = "Simulated problem " + std::to_string(i) +
                         ". Compute the requested quantity. " +
                         std::string(padding, '.');
    world.questions.push_back(QuestionRecord::Make(
        id, std::move(prompt), std::to_string(1000 + i), TaskKind::kOpenMath));
    world.true_probs.push_back(p);
  }
  return world;
}

SimulatedBackend::SimulatedBackend(const SimulatedWorld& world,
                                   uint64_t sampling_seed)
    : world_(world), sampling_seed_(sampling_seed) {
  for (size_t i = 0; i < world.questions.size(); ++i) {
    index_.emplace(world.questions[i].id, i);
  }
}

std::string SimulatedBackend::Endpoint() const {
  return "sim://world/" + std::to_string(world_.config.rng_seed) + "/sampling/" +
         std::to_string(sampling_seed_);
}

double SimulatedBackend::TrueProb(std::string_view question_id) const {
  auto it = index_.find(std::string(question_id));
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownQuestion,
                "question '" + std::string(question_id) + "' not in world");
  }
  return world_.true_probs[it->second];
}

BackendSample SimulatedBackend::MakeSample(size_t question, int64_t sample_index,
                                           std::string_view prompt,
                                           bool want_logprobs) const {
  const WorldConfig& cfg = world_.config;
  const double p_true = world_.true_probs[question];
  const auto q = static_cast<uint64_t>(question);

  Rng shared(StreamSeed({sampling_seed_, kTagShared, q}));
  const bool is_shared = Uniform01(shared) < cfg.correlation_rho;
  const bool shared_correct = Uniform01(shared) < p_true;
  std::uniform_int_distribution<int64_t> pick(0, cfg.n_distractors - 1);
  const int64_t shared_distractor = pick(shared);

  Rng own(StreamSeed({sampling_seed_, kTagSample, q,
                      static_cast<uint64_t>(sample_index)}));
  const bool own_correct = Uniform01(own) < p_true;
  const int64_t own_distractor = pick(own);
  const double noise =
      cfg.signal_noise_sigma > 0.0
          ? std::normal_distribution<double>(0.0, cfg.signal_noise_sigma)(own)
          : 0.0;

  const bool correct = is_shared ? shared_correct : own_correct;
  const int64_t distractor = is_shared ? shared_distractor : own_distractor;
  const double p_signal = std::clamp(p_true + noise, kSimProbFloor, 1.0);
  const double anll = -cfg.world_temperature * std::log(p_signal);

  BackendSample sample;
  const QuestionRecord& record = world_.questions[question];
  if (prompt.starts_with(kJudgeInstruction)) {
    sample.text = p_true >= 0.5 ? "easy" : "hard";
  } else {
    const std::string answer = correct ? *record.gold_answer
                                       : "wrong_" + std::to_string(distractor);
    sample.text = "Working through " + record.id + " step by step.\nThe answer is \\boxed{" +
                  answer + "}.";
    if (prompt.find(kVcsInstruction) != std::string_view::npos) {
      const auto rating =
          std::clamp<long>(std::lround(10.0 * p_signal), 1, 10);
      sample.text += "\nConfidence: " + std::to_string(rating);
    }
  }
  if (want_logprobs) {
    sample.token_logprobs.assign(kSimTokenCount, -anll);
  }
  return sample;
}

BackendResponse SimulatedBackend::Generate(const BackendRequest& request) {
  auto it = index_.find(request.question_id);
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownQuestion,
                "question '" + request.question_id + "' not in world");
  }
  BackendResponse response;
  for (int64_t k = 0; k < request.sample_count; ++k) {
    response.samples.push_back(MakeSample(it->second, request.first_sample_index + k,
                                          request.prompt, request.want_logprobs));
  }
  return response;
}

std::vector<GenerationRecord> SimulatedBackend::SimulateSamples(
    std::string_view question_id, int64_t n, int64_t first_index, Phase phase) {
  auto it = index_.find(std::string(question_id));
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownQuestion,
                "question '" + std::string(question_id) + "' not in world");
  }
  const QuestionRecord& record = world_.questions[it->second];
  std::vector<GenerationRecord> out;
  for (int64_t k = 0; k < n; ++k) {
    BackendSample s = MakeSample(it->second, first_index + k, record.prompt, true);
    GenerationRecord g;
    g.question_id = record.id;
    g.phase = phase;
    g.sample_index = first_index + k;
    g.parsed_answer = ParseAnswer(s.text, record.task_kind);
    g.text = std::move(s.text);
    g.token_logprobs = std::move(s.token_logprobs);
    g.finish_reason = s.finish_reason;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace uab
