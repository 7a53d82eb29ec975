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

#include "uab/experiment.h"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include <spdlog/spdlog.h>

#include "uab/coverage.h"
#include "uab/errors.h"
#include "uab/response_cache.h"

namespace uab {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::array<std::string_view, 28> kKeys = {
    "pipeline.policy",       "pipeline.signal",     "pipeline.n",
    "pipeline.temperature",  "pipeline.phase1_k",   "pipeline.exit",
    "pipeline.theta",        "pipeline.exit_mode",  "pipeline.sampling_temperature",
    "pipeline.max_tokens",   "pipeline.parallelism", "backend.kind",
    "world.m_questions",     "world.prob_law",      "world.n_distractors",
    "world.noise_sigma",     "world.rho",           "world.temperature",
    "world.seed",            "http.endpoint",       "http.model",
    "http.max_retries",      "http.max_in_flight",  "http.timeout_s",
    "input.questions",       "cache.dir",           "experiment.seeds",
    "experiment.out",
};

template <typename T>
T ParseNumber(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kConfig,
                std::string(key) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

std::vector<uint64_t> ParseSeeds(std::string_view text) {
  std::vector<uint64_t> seeds;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) seeds.push_back(ParseNumber<uint64_t>("experiment.seeds", item));
    start = comma + 1;
  }
  return seeds;
}

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string_view BackendKindName(BackendKind kind) {
  return kind == BackendKind::kHttp ? "http" : "sim";
}

BackendKind ParseBackendKind(std::string_view name) {
  if (name == "sim" || name == "simulated") return BackendKind::kSimulated;
  if (name == "http") return BackendKind::kHttp;
  throw Error(ErrorCode::kConfig, "unknown backend '" + std::string(name) + "'");
}

std::span<const std::string_view> KnownConfigKeys() { return kKeys; }

void ExperimentConfig::Validate() const {
  if (seeds.empty()) throw Error(ErrorCode::kConfig, "at least one seed is required");
  pipeline.Validate();
  if (backend == BackendKind::kSimulated) {
    world.Validate();
  } else {
    if (!questions_path) {
      throw Error(ErrorCode::kConfig, "http backend needs input.questions");
    }
    if (http.endpoint.empty()) {
      throw Error(ErrorCode::kConfig, std::string("http backend needs ") + kEnvEndpoint);
    }
  }
}

ExperimentConfig BuildExperimentConfig(const ConfigStore& settings) {
  for (const auto& [key, value] : settings.entries()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
    }
  }
  auto get = [&](std::string_view key) { return settings.Get(key); };
  auto get_int = [&](std::string_view key, int64_t fallback) {
    auto v = get(key);
    return v ? ParseNumber<int64_t>(key, *v) : fallback;
  };
  auto get_double = [&](std::string_view key, double fallback) {
    auto v = get(key);
    return v ? ParseNumber<double>(key, *v) : fallback;
  };

  ExperimentConfig config;
  PipelineConfig& p = config.pipeline;
  try {
    if (auto v = get("pipeline.policy")) p.policy = ParsePolicy(*v);
    if (auto v = get("pipeline.signal")) p.signal_kind = ParseSignalKind(*v);
    if (auto v = get("pipeline.exit")) p.threshold_exit.exit_kind = ParseExitKind(*v);
    if (auto v = get("pipeline.exit_mode")) p.threshold_exit.mode = ParseExitMode(*v);
    if (auto v = get("world.prob_law")) config.world.prob_law = ParseProbLaw(*v);
    if (auto v = get("backend.kind")) config.backend = ParseBackendKind(*v);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  p.threshold_exit.theta = get_double("pipeline.theta", p.threshold_exit.theta);
  const int64_t default_k = p.signal_kind == SignalKind::kVoteEntropy ? 2 : 1;
  p.phase1_samples_k = get_int("pipeline.phase1_k", default_k);
  p.budget = BudgetSpec(get_int("pipeline.n", 4), 1,
                        get_double("pipeline.temperature", BudgetSpec::kDefaultTemperature));
  p.sampling_temperature =
      get_double("pipeline.sampling_temperature", kDefaultSamplingTemperature);
  p.max_tokens = get_int("pipeline.max_tokens", kDefaultMaxTokens);
  p.parallelism = static_cast<int>(get_int("pipeline.parallelism", p.parallelism));

  WorldConfig& w = config.world;
  w.m_questions = get_int("world.m_questions", w.m_questions);
  w.n_distractors = get_int("world.n_distractors", w.n_distractors);
  w.signal_noise_sigma = get_double("world.noise_sigma", w.signal_noise_sigma);
  w.correlation_rho = get_double("world.rho", w.correlation_rho);
  w.world_temperature = get_double("world.temperature", w.world_temperature);
  w.rng_seed = static_cast<uint64_t>(get_int("world.seed", 0));

  config.http.endpoint = get("http.endpoint").value_or("");
  config.http.model = get("http.model").value_or("");
  config.http.api_key = ProcessEnv(kEnvApiKey).value_or("");
  config.http.max_retries = static_cast<int>(get_int("http.max_retries", config.http.max_retries));
  config.http.max_in_flight =
      static_cast<int>(get_int("http.max_in_flight", config.http.max_in_flight));
  config.http.timeout = std::chrono::seconds(get_int("http.timeout_s", config.http.timeout.count()));

  if (auto v = get("input.questions")) config.questions_path = *v;
  if (auto v = get("cache.dir")) config.cache_dir = *v;
  if (auto v = get("experiment.seeds")) config.seeds = ParseSeeds(*v);
  if (auto v = get("experiment.out")) config.output_dir = *v;
  return config;
}

std::vector<QuestionRecord> LoadQuestionsJsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read questions " + path.string());
  std::vector<QuestionRecord> questions;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const json row = json::parse(line);
      std::optional<std::string> gold;
      if (row.contains("gold_answer") && !row["gold_answer"].is_null()) {
        gold = row["gold_answer"].get<std::string>();
      }
      const TaskKind kind = ParseTaskKind(row.value("task_kind", std::string("open_math")));
      questions.push_back(QuestionRecord::Make(row.at("id").get<std::string>(),
                                               row.at("prompt").get<std::string>(), gold,
                                               kind));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kValidation, where + ": " + e.what());
    }
  }
  ValidateQuestions(questions);
  return questions;
}

std::string ResultsToJsonl(const PipelineRun& run) {
  std::string out;
  for (const auto& r : run.results) {
    ordered_json row;
    row["question_id"] = r.question_id;
    row["policy"] = r.policy;
    row["final_answer"] = r.final_answer;
    row["correct"] = r.correct ? json(*r.correct) : json(nullptr);
    row["samples_used"] = r.samples_used;
    row["anll"] = r.anll ? json(*r.anll) : json(nullptr);
    row["p_i"] = r.difficulty.prob;
    out += row.dump();
    out += '\n';
  }
  return out;
}

SeedReport ScoreRun(uint64_t seed, const PipelineRun& run) {
  SeedReport report;
  report.seed = seed;
  report.samples_issued = run.samples_issued;
  report.budget_effective = run.alloc.budget_effective;
  report.saved_units = run.saved_units;

  const size_t m = run.results.size();
  double correct = 0.0, graded = 0.0, covered = 0.0, coverage = 0.0;
  std::vector<double> anll, outcome, difficulty;
  std::vector<int64_t> extras;
  for (size_t i = 0; i < m; ++i) {
    const ExperimentResult& r = run.results[i];
    coverage += AtLeastOneCorrect(r.difficulty.prob, r.samples_used);
    if (r.correct) {
      graded += 1.0;
      correct += *r.correct ? 1.0 : 0.0;
      if (r.anll) {
        anll.push_back(*r.anll);
        outcome.push_back(*r.correct ? 1.0 : 0.0);
      }
    }
    if (r.any_sample_correct && *r.any_sample_correct) covered += 1.0;
    difficulty.push_back(r.difficulty.score);
    extras.push_back(run.alloc.extras[i]);
  }
  const double md = m == 0 ? 1.0 : static_cast<double>(m);
  report.accuracy = graded > 0 ? correct / graded : std::numeric_limits<double>::quiet_NaN();
  report.coverage_estimated = coverage / md;
  report.coverage_realized = covered / md;
  if (anll.size() >= 2) {
    try {
      report.anll_correctness_pearson = PearsonR(anll, outcome);
    } catch (const Error&) {
    }
  }
  report.deciles = AllocationByDecile(difficulty, extras);
  return report;
}

std::string AggregateCsvRow(const MetricReport& report) {
  std::ostringstream row;
  row << report.policy << ',' << report.n_per_question << ',' << report.seeds.size() << ','
      << FormatNumber(report.accuracy_mean) << ',' << FormatNumber(report.accuracy_std)
      << ',' << FormatNumber(report.coverage_mean) << ','
      << FormatNumber(report.budget_saved_pct);
  return row.str();
}

MetricReport RunExperiment(const ExperimentConfig& config) {
  config.Validate();

  std::optional<SimulatedWorld> world;
  std::vector<QuestionRecord> questions;
  if (config.backend == BackendKind::kSimulated) {
    world = SimulatedWorld::Build(config.world);
    questions = world->questions;
  } else {
    questions = LoadQuestionsJsonl(*config.questions_path);
  }
  if (questions.empty()) throw Error(ErrorCode::kEmptyInput, "no questions to run");

  std::unique_ptr<HttpBackend> http;
  if (config.backend == BackendKind::kHttp) http = std::make_unique<HttpBackend>(config.http);
  std::unique_ptr<ResponseCache> cache;
  if (config.cache_dir) cache = std::make_unique<ResponseCache>(*config.cache_dir);

  MetricReport report;
  report.policy = std::string(PolicyName(config.pipeline.policy));
  report.n_per_question = config.pipeline.budget.n_per_question();

  if (config.write_files) std::filesystem::create_directories(config.output_dir);

  for (uint64_t seed : config.seeds) {
    try {
      PipelineConfig pc = config.pipeline;
      pc.budget = BudgetSpec(config.pipeline.budget.n_per_question(),
                             static_cast<int64_t>(questions.size()),
                             config.pipeline.budget.temperature());
      pc.rng_seed = seed;

      std::unique_ptr<SimulatedBackend> sim;
      Backend* backend = http.get();
      if (world) {
        sim = std::make_unique<SimulatedBackend>(*world, seed);
        backend = sim.get();
      }
      std::unique_ptr<CachingBackend> cached;
      if (cache) {
        cached = std::make_unique<CachingBackend>(*backend, *cache);
        backend = cached.get();
      }

      PipelineRun run = RunTwoPhase(questions, *backend, pc);
      if (config.write_files) {
        const auto path = config.output_dir /
                          (report.policy + "_N" + std::to_string(report.n_per_question) +
                           "_seed" + std::to_string(seed) + ".jsonl");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << ResultsToJsonl(run);
        if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
      }
      report.seeds.push_back(ScoreRun(seed, run));
      spdlog::info("seed {}: accuracy {:.4f}, coverage {:.4f}", seed,
                   report.seeds.back().accuracy, report.seeds.back().coverage_estimated);
    } catch (const std::exception& e) {
      spdlog::error("seed {} failed: {}", seed, e.what());
      report.failed_seeds.push_back(seed);
    }
  }

  if (report.seeds.empty()) return report;

  std::vector<double> acc, cov, real, pearson;
  std::vector<double> deciles(10, 0.0);
  int64_t saved = 0, b_eff = 0;
  for (const auto& s : report.seeds) {
    acc.push_back(s.accuracy);
    cov.push_back(s.coverage_estimated);
    real.push_back(s.coverage_realized);
    if (s.anll_correctness_pearson) pearson.push_back(*s.anll_correctness_pearson);
    for (size_t d = 0; d < 10; ++d) deciles[d] += s.deciles.mean_extras[d];
    report.samples_issued += s.samples_issued;
    saved += s.saved_units;
    b_eff += s.budget_effective;
  }
  for (double& d : deciles) d /= static_cast<double>(report.seeds.size());
  report.accuracy_mean = Mean(acc);
  report.accuracy_std = SampleStd(acc);
  report.coverage_mean = Mean(cov);
  report.realized_coverage_mean = Mean(real);
  if (!pearson.empty()) report.anll_correctness_pearson = Mean(pearson);
  report.per_decile_allocation = deciles;
  report.budget_saved_pct =
      b_eff > 0 ? 100.0 * static_cast<double>(saved) / static_cast<double>(b_eff) : 0.0;

  if (config.write_files) {
    const auto csv = config.output_dir / "aggregate.csv";
    const bool fresh = !std::filesystem::exists(csv) || std::filesystem::file_size(csv) == 0;
    std::ofstream out(csv, std::ios::app);
    if (fresh) out << kAggregateCsvHeader << '\n';
    out << AggregateCsvRow(report) << '\n';
  }
  return report;
}

ordered_json ReportToJson(const MetricReport& report) {
  auto nan_to_null = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  ordered_json out;
  out["policy"] = report.policy;
  out["N"] = report.n_per_question;
  out["seed_count"] = report.seeds.size();
  out["accuracy_mean"] = nan_to_null(report.accuracy_mean);
  out["accuracy_std"] = nan_to_null(report.accuracy_std);
  out["coverage_mean"] = report.coverage_mean;
  out["realized_coverage_mean"] = report.realized_coverage_mean;
  out["samples_issued"] = report.samples_issued;
  out["budget_saved_pct"] = report.budget_saved_pct;
  out["anll_correctness_pearson"] = report.anll_correctness_pearson
                                        ? json(*report.anll_correctness_pearson)
                                        : json(nullptr);
  out["per_decile_allocation"] =
      report.per_decile_allocation ? json(*report.per_decile_allocation) : json(nullptr);
  out["failed_seeds"] = report.failed_seeds;
  return out;
}

}  // namespace uab
