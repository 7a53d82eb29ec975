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

#include "uab/pipeline.h"

#include <algorithm>
#include <atomic>
#include <thread>

#include <spdlog/spdlog.h>

#include "uab/answers.h"
#include "uab/errors.h"
#include "uab/signals.h"

namespace uab {
namespace {

template <typename Fn>
void ParallelFor(size_t n, int parallelism, Fn&& fn) {
  const size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(1, parallelism)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

std::vector<GenerationRecord> Sample(Backend& backend, const QuestionRecord& question,
                                     const std::string& prompt, int64_t n,
                                     int64_t first_index, Phase phase,
                                     const PipelineConfig& config, bool want_logprobs) {
  BackendRequest request;
  request.question_id = question.id;
  request.prompt = prompt;
  request.sample_count = n;
  request.first_sample_index = first_index;
  request.sampling_temperature = config.sampling_temperature;
  request.max_tokens = config.max_tokens;
  request.want_logprobs = want_logprobs;
  request.seed = config.rng_seed;

  std::vector<GenerationRecord> records(static_cast<size_t>(n));
  for (int64_t k = 0; k < n; ++k) {
    records[k].question_id = question.id;
    records[k].phase = phase;
    records[k].sample_index = first_index + k;
    records[k].finish_reason = FinishReason::kError;
  }
  try {
    BackendResponse response = backend.Generate(request);
    if (response.samples.size() != static_cast<size_t>(n)) {
      throw Error(ErrorCode::kBackend, "sample count mismatch");
    }
    for (int64_t k = 0; k < n; ++k) {
      BackendSample& s = response.samples[k];
      records[k].finish_reason = s.finish_reason;
      if (s.finish_reason != FinishReason::kError) {
        records[k].parsed_answer = ParseAnswer(s.text, question.task_kind);
      }
      records[k].text = std::move(s.text);
      records[k].token_logprobs = std::move(s.token_logprobs);
    }
  } catch (const std::exception& e) {
    spdlog::warn("generation failed for '{}' ({} samples): {}", question.id, n, e.what());
  }
  return records;
}

bool Usable(const GenerationRecord& g) {
  return g.finish_reason != FinishReason::kError && !g.token_logprobs.empty();
}

double LogprobSignal(SignalKind signal, std::span<const double> logprobs) {
  switch (signal) {
    case SignalKind::kAnll: return Anll(logprobs);
    case SignalKind::kTotalNll: return TotalNll(logprobs);
    case SignalKind::kTokenVar: return TokenVar(logprobs);
    case SignalKind::kMaxTokenNll: return MaxTokenNll(logprobs);
    default: break;
  }
  throw Error(ErrorCode::kValidation, "not a logprob signal");
}

std::optional<double> MeanAnll(std::span<const GenerationRecord> phase1) {
  double total = 0.0;
  int64_t count = 0;
  for (const auto& g : phase1) {
    if (!Usable(g)) continue;
    try {
      total += Anll(g.token_logprobs);
      ++count;
    } catch (const Error&) {
    }
  }
  if (count == 0) return std::nullopt;
  return total / static_cast<double>(count);
}

}  // namespace

std::string_view PolicyName(Policy policy) {
  switch (policy) {
    case Policy::kUab: return "uab";
    case Policy::kUniform: return "uniform";
    case Policy::kRandom: return "random";
    case Policy::kLength: return "length";
    case Policy::kLlmJudge: return "llm_judge";
  }
  return "uab";
}

Policy ParsePolicy(std::string_view name) {
  for (auto p : {Policy::kUab, Policy::kUniform, Policy::kRandom, Policy::kLength,
                 Policy::kLlmJudge}) {
    if (PolicyName(p) == name) return p;
  }
  throw Error(ErrorCode::kValidation, "unknown policy '" + std::string(name) + "'");
}

void PipelineConfig::Validate() const {
  if (phase1_samples_k < 1 || phase1_samples_k > budget.n_per_question()) {
    throw Error(ErrorCode::kValidation, "phase1_samples_k must lie in [1, N]");
  }
  if (signal_kind == SignalKind::kVoteEntropy && phase1_samples_k < 2) {
    throw Error(ErrorCode::kValidation, "vote entropy needs phase1_samples_k >= 2");
  }
  if (signal_kind == SignalKind::kExternal) {
    throw Error(ErrorCode::kValidation,
                "external scores can only be allocated directly, not run");
  }
  threshold_exit.Validate();
}

ProbTable LengthProbabilities(std::span<const QuestionRecord> questions,
                              double temperature) {
  ProbTable probs;
  if (questions.empty()) return probs;
  auto [lo, hi] = std::minmax_element(
      questions.begin(), questions.end(),
      [](const auto& a, const auto& b) { return a.length_chars < b.length_chars; });
  const auto range = static_cast<double>(hi->length_chars - lo->length_chars);
  for (const auto& q : questions) {
    const double normalized =
        range > 0 ? static_cast<double>(q.length_chars - lo->length_chars) / range : 0.0;
    probs.Add(q.id, ScoreToProb(normalized, temperature));
  }
  return probs;
}

AllocationVector AllocateBaseline(Policy policy, std::span<const QuestionRecord> questions,
                                  const std::map<std::string, JudgeLabel>* judge_labels,
                                  const BudgetSpec& budget, Rng& rng, int64_t phase1_k) {
  std::vector<std::string> ids;
  for (const auto& q : questions) ids.push_back(q.id);
  const int64_t b_eff = (budget.n_per_question() - phase1_k) *
                        static_cast<int64_t>(questions.size());
  AllocationVector alloc = AllocationVector::Zeros(ids, b_eff);
  const auto m = static_cast<int64_t>(questions.size());
  if (m == 0) return alloc;
  switch (policy) {
    case Policy::kUniform:
      std::fill(alloc.extras.begin(), alloc.extras.end(),
                budget.n_per_question() - phase1_k);
      break;
    case Policy::kRandom: {
      std::uniform_int_distribution<int64_t> pick(0, m - 1);
      for (int64_t t = 0; t < b_eff; ++t) ++alloc.extras[pick(rng)];
      break;
    }
    case Policy::kLength:
      alloc = GreedyAllocate(LengthProbabilities(questions, budget.temperature()), b_eff);
      break;
    case Policy::kLlmJudge: {
      if (judge_labels == nullptr) {
        throw Error(ErrorCode::kValidation, "llm_judge policy requires judge labels");
      }
      std::vector<size_t> hard;
      for (size_t i = 0; i < questions.size(); ++i) {
        auto it = judge_labels->find(questions[i].id);
        if (it == judge_labels->end() || it->second == JudgeLabel::kHard) hard.push_back(i);
      }
      if (hard.empty()) {
        spdlog::warn("judge labelled every question easy; dealing {} units round-robin",
                     b_eff);
        for (size_t i = 0; i < questions.size(); ++i) hard.push_back(i);
      }
      const auto h = static_cast<int64_t>(hard.size());
      for (int64_t k = 0; k < h; ++k) {
        alloc.extras[hard[k]] = b_eff / h + (k < b_eff % h ? 1 : 0);
      }
      break;
    }
    case Policy::kUab:
      throw Error(ErrorCode::kValidation, "uab is not a baseline policy");
  }
  return alloc;
}

DifficultyEstimate EstimateDifficulty(const QuestionRecord& question,
                                      std::span<const GenerationRecord> phase1,
                                      SignalKind signal, double temperature) {
  DifficultyEstimate est;
  est.question_id = question.id;
  est.signal_kind = signal;
  auto fallback = [&](const char* why) {
    spdlog::warn("no {} signal for '{}' ({}); using p = {}", SignalKindName(signal),
                 question.id, why, kVcsFallbackProb);
    est.prob = kVcsFallbackProb;
    est.score = signal == SignalKind::kVcs ? 1.0 - kVcsFallbackProb
                                           : -temperature * std::log(kVcsFallbackProb);
    est.fallback = true;
    return est;
  };

  if (SignalNeedsLogprobs(signal)) {
    double total = 0.0;
    int64_t count = 0;
    for (const auto& g : phase1) {
      if (!Usable(g)) continue;
      try {
        total += LogprobSignal(signal, g.token_logprobs);
        ++count;
      } catch (const Error&) {
      }
    }
    if (count == 0) return fallback("no usable logprobs");
    est.score = total / static_cast<double>(count);
    est.prob = ScoreToProb(est.score, temperature);
    return est;
  }
  if (signal == SignalKind::kVcs) {
    double total = 0.0;
    int64_t count = 0;
    for (const auto& g : phase1) {
      if (g.finish_reason == FinishReason::kError) continue;
      try {
        total += ParseVcs(g.text);
        ++count;
      } catch (const Error&) {
      }
    }
    if (count == 0) return fallback("vcs_unparsable");
    est.prob = total / static_cast<double>(count);
    est.score = 1.0 - est.prob;
    return est;
  }
  if (signal == SignalKind::kVoteEntropy) {
    std::vector<std::string> answers;
    for (const auto& g : phase1) {
      if (g.finish_reason == FinishReason::kError) continue;
      // Abstentions count as their own outcome so they register as disagreement.
      answers.push_back(g.parsed_answer ? "=" + *g.parsed_answer : "!abstain");
    }
    if (answers.empty()) return fallback("all samples failed");
    est.score = VoteEntropy(answers);
    est.prob = ScoreToProb(est.score, temperature);
    return est;
  }
  throw Error(ErrorCode::kValidation, "signal '" + std::string(SignalKindName(signal)) +
                                          "' is computed at batch level");
}

PipelineRun RunTwoPhase(std::span<const QuestionRecord> questions, Backend& backend,
                        const PipelineConfig& config) {
  config.Validate();
  ValidateQuestions(questions);
  if (static_cast<int64_t>(questions.size()) != config.budget.m_questions()) {
    throw Error(ErrorCode::kValidation, "budget is sized for " +
                                            std::to_string(config.budget.m_questions()) +
                                            " questions, got " +
                                            std::to_string(questions.size()));
  }
  const size_t m = questions.size();
  const int64_t k = config.phase1_samples_k;
  const double temperature = config.budget.temperature();
  const SignalKind signal =
      config.policy == Policy::kLength ? SignalKind::kLength : config.signal_kind;
  const bool want_logprobs =
      signal != SignalKind::kVcs && signal != SignalKind::kVoteEntropy;

  PipelineRun run;

  std::map<std::string, JudgeLabel> judge_labels;
  if (config.policy == Policy::kLlmJudge) {
    std::vector<JudgeLabel> labels(m, JudgeLabel::kHard);
    ParallelFor(m, config.parallelism,
                [&](size_t i) { labels[i] = JudgeClassify(questions[i], backend); });
    for (size_t i = 0; i < m; ++i) judge_labels.emplace(questions[i].id, labels[i]);
    run.judge_calls = static_cast<int64_t>(m);
  }

  std::vector<std::string> prompts(m);
  for (size_t i = 0; i < m; ++i) {
    prompts[i] = signal == SignalKind::kVcs ? WithVcsInstruction(questions[i].prompt)
                                            : questions[i].prompt;
  }

  std::vector<std::vector<GenerationRecord>> samples(m);
  ParallelFor(m, config.parallelism, [&](size_t i) {
    samples[i] = Sample(backend, questions[i], prompts[i], k, 0, Phase::kPhase1, config,
                        want_logprobs);
  });

  std::vector<DifficultyEstimate> estimates(m);
  if (signal == SignalKind::kLength) {
    ProbTable length_probs = LengthProbabilities(questions, temperature);
    for (size_t i = 0; i < m; ++i) {
      estimates[i].question_id = questions[i].id;
      estimates[i].signal_kind = SignalKind::kLength;
      estimates[i].prob = length_probs.p(i);
      estimates[i].score = -temperature * std::log(length_probs.p(i));
    }
  } else {
    for (size_t i = 0; i < m; ++i) {
      estimates[i] = EstimateDifficulty(questions[i], samples[i], signal, temperature);
    }
  }
  for (const auto& est : estimates) run.probs.Add(est.question_id, est.prob);

  const int64_t b_eff = config.budget.effective(k);
  if (config.policy == Policy::kUab) {
    ThresholdExitResult exits = ApplyThresholdExits(run.probs, b_eff, config.threshold_exit);
    run.alloc = std::move(exits.alloc);
    run.eligible = std::move(exits.eligible);
    run.saved_units = exits.saved_units;
  } else {
    Rng rng(StreamSeed({config.rng_seed, 0x5EEDULL}));
    run.alloc = AllocateBaseline(config.policy, questions, &judge_labels, config.budget,
                                 rng, k);
    run.eligible = run.probs.ids();
  }

  ParallelFor(m, config.parallelism, [&](size_t i) {
    const int64_t extra = run.alloc.extras[i];
    if (extra <= 0) return;
    auto more = Sample(backend, questions[i], prompts[i], extra, k, Phase::kPhase2,
                       config, want_logprobs);
    samples[i].insert(samples[i].end(), std::make_move_iterator(more.begin()),
                      std::make_move_iterator(more.end()));
  });

  for (size_t i = 0; i < m; ++i) {
    const QuestionRecord& q = questions[i];
    ExperimentResult result;
    result.question_id = q.id;
    result.policy = std::string(PolicyName(config.policy));
    result.samples_used = k + run.alloc.extras[i];
    result.difficulty = estimates[i];
    result.anll = MeanAnll(std::span(samples[i]).first(static_cast<size_t>(k)));

    std::vector<std::optional<std::string>> votes;
    for (const auto& g : samples[i]) votes.push_back(g.parsed_answer);
    try {
      result.final_answer = MajorityVote(votes).winner;
    } catch (const Error&) {
      result.final_answer.clear();
    }
    if (q.gold_answer) {
      const std::string gold = CanonicalAnswer(*q.gold_answer);
      result.correct = !result.final_answer.empty() && result.final_answer == gold;
      result.any_sample_correct = std::any_of(votes.begin(), votes.end(),
                                              [&](const auto& v) { return v && *v == gold; });
    }
    run.samples_issued += static_cast<int64_t>(samples[i].size());
    run.results.push_back(std::move(result));
  }
  for (auto& per_question : samples) {
    std::move(per_question.begin(), per_question.end(), std::back_inserter(run.generations));
  }
  return run;
}

}  // namespace uab
