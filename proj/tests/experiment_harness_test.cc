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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "test_util.h"
#include "uab/allocation.h"
#include "uab/config.h"
#include "uab/experiment.h"
#include "uab/metrics.h"
#include "uab/pchip.h"
#include "uab/verify.h"

namespace uab {
namespace {

using testing::ThrownCode;
namespace fs = std::filesystem;

// Two-pass textbook formula, kept separate from the library's implementation.
double NaivePearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST_CASE("pearson examples") {
  const std::vector<double> x = {1, 2, 3};
  CHECK(PearsonR(x, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(PearsonR(x, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<double> a = {0, 1, 2, 3};
  const std::vector<double> b = {1, 0, 3, 2};
  CHECK(NaivePearson(a, b) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(PearsonR(a, b) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(ThrownCode([] {
          PearsonR(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3});
        }) == ErrorCode::kUndefinedCorrelation);
  CHECK(ThrownCode([] {
          PearsonR(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3});
        }) == ErrorCode::kValidation);
}

TEST_CASE("pearson agrees with the naive formula on random data") {
  Rng rng(4);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(37), y(37);
    for (size_t i = 0; i < x.size(); ++i) {
      x[i] = normal(rng);
      y[i] = 0.3 * x[i] + normal(rng);
    }
    const double r = PearsonR(x, y);
    CHECK(std::abs(r - NaivePearson(x, y)) < 1e-12);
    CHECK(std::abs(r) <= 1.0);
  }
}

TEST_CASE("mean and sample std") {
  const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(Mean(v) == 5.0);
  CHECK(SampleStd(v) == doctest::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-14));
  CHECK(SampleStd(std::vector<double>{3}) == 0.0);
  CHECK(ThrownCode([] { Mean(std::vector<double>{}); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("decile allocation") {
  std::vector<double> difficulty;
  std::vector<int64_t> extras;
  for (int i = 0; i < 20; ++i) {
    difficulty.push_back(19 - i);
    extras.push_back(i);
  }
  const DecileAllocation d = AllocationByDecile(difficulty, extras);
  int64_t total = 0;
  double weighted = 0;
  for (int k = 0; k < 10; ++k) {
    CHECK(d.counts[k] == 2);
    total += d.counts[k];
    weighted += d.mean_extras[k] * d.counts[k];
  }
  CHECK(total == 20);
  CHECK(weighted == doctest::Approx(190.0));
  // Easiest decile holds the two largest extras here.
  CHECK(d.mean_extras[0] == 18.5);
  CHECK(d.mean_extras[9] == 0.5);
}

const std::vector<std::pair<double, double>> kCurve = {{1, 40}, {2, 44}, {4, 48}, {8, 50}};

TEST_CASE("curve inversion examples") {
  const std::vector<double> targets = {44, 60, 46, 40, 50};
  const auto out = MinBudgetCurve(kCurve, targets);
  REQUIRE(out.size() == 5);
  CHECK(out[0].min_budget == 2.0);
  CHECK_FALSE(out[1].min_budget.has_value());
  // Frozen from a dense-grid (step 1e-4) evaluation of an independent
  // Hermite implementation, refined by bisection.
  REQUIRE(out[2].min_budget.has_value());
  CHECK(std::abs(*out[2].min_budget - 2.784956466524354) <= kInversionTolerance);
  CHECK(*out[2].min_budget > 2.0);
  CHECK(*out[2].min_budget < 4.0);
  CHECK(out[3].min_budget == 1.0);
  CHECK(out[4].min_budget == 8.0);
}

TEST_CASE("interpolant slopes, knots and monotonicity") {
  std::vector<double> xs, ys;
  for (const auto& [x, y] : kCurve) {
    xs.push_back(x);
    ys.push_back(y);
  }
  const MonotoneCubicInterpolant f(xs, ys);
  CHECK(f.slopes() == std::vector<double>{4.0, 3.0, 1.25, 0.5});
  for (size_t i = 0; i < xs.size(); ++i) CHECK(f(xs[i]) == ys[i]);
  double prev = f(1.0);
  for (double x = 1.0; x <= 8.0; x += 1e-3) {
    const double y = f(x);
    CHECK(y >= prev - 1e-12);
    prev = y;
  }
  CHECK(ThrownCode([&] { f(0.5); }) == ErrorCode::kValidation);
  // A local extremum gets a zero slope and no overshoot.
  const MonotoneCubicInterpolant g({0, 1, 2}, {0, 1, 0});
  CHECK(g.slopes()[1] == 0.0);
  for (double x = 0; x <= 2; x += 1e-3) CHECK(g(x) <= 1.0 + 1e-12);
  // Steep data trips the rescaling.
  const MonotoneCubicInterpolant h({0, 1, 2, 3}, {0, 0.1, 10, 10.1});
  for (size_t k = 0; k + 1 < 4; ++k) {
    const double delta = h.ys()[k + 1] - h.ys()[k];
    const double a = h.slopes()[k] / delta;
    const double b = h.slopes()[k + 1] / delta;
    CHECK(a * a + b * b <= 9.0 + 1e-9);
  }
  CHECK(ThrownCode([] { MonotoneCubicInterpolant({2, 1}, {0, 1}); }) == ErrorCode::kValidation);
  CHECK(ThrownCode([] { MonotoneCubicInterpolant({1}, {0}); }) == ErrorCode::kValidation);
}

TEST_CASE("inversion searches only up to the peak") {
  const std::vector<std::pair<double, double>> dip = {{1, 40}, {2, 50}, {4, 45}, {8, 49}};
  const auto out = MinBudgetCurve(dip, std::vector<double>{47, 50, 50.5});
  REQUIRE(out[0].min_budget.has_value());
  CHECK(*out[0].min_budget < 2.0);
  CHECK(out[1].min_budget == 2.0);
  CHECK_FALSE(out[2].min_budget.has_value());
}

TEST_CASE("config text parsing") {
  const ConfigStore c = ConfigStore::Parse(
      "# comment\n\npipeline.policy = uab  # trailing\nworld.rho=0.25\n", "t.conf");
  CHECK(c.Get("pipeline.policy") == "uab");
  CHECK(c.Get("world.rho") == "0.25");
  CHECK_FALSE(c.Get("pipeline.n").has_value());
  CHECK(ThrownCode([] { ConfigStore::Parse("novalue\n"); }) == ErrorCode::kConfig);
  CHECK(ThrownCode([] { ConfigStore::Parse("bad key = 1\n"); }) == ErrorCode::kConfig);
  CHECK(testing::ThrownMessage([] { ConfigStore::Parse("a = 1\nb\n", "x.conf"); })
            .find("x.conf:2") != std::string::npos);
}

TEST_CASE("config rejects credentials") {
  for (const char* text : {"http.api_key = sk-1", "http.apikey = x", "http.auth_header = y",
                           "db.password = z", "client.secret = s"}) {
    CHECK(ThrownCode([&] { ConfigStore::Parse(text); }) == ErrorCode::kConfig);
  }
  CHECK_NOTHROW(ConfigStore::Parse("pipeline.max_tokens = 64"));
}

TEST_CASE("config precedence and environment names") {
  CHECK(EnvVarName("world.noise_sigma") == "UAB_WORLD_NOISE_SIGMA");
  const std::vector<std::string_view> keys = {"pipeline.n", "pipeline.policy"};
  const ConfigStore env = ConfigStore::FromEnv(keys, [](const std::string& name) {
    return name == "UAB_PIPELINE_N" ? std::optional<std::string>("8") : std::nullopt;
  });
  CHECK(env.entries().size() == 1);
  ConfigStore merged = ConfigStore::Parse("pipeline.n = 4\npipeline.policy = random\n");
  merged.Overlay(env);
  CHECK(merged.Get("pipeline.n") == "8");
  ConfigStore cli;
  cli.Set("pipeline.policy", "uniform");
  merged.Overlay(cli);
  CHECK(merged.Get("pipeline.policy") == "uniform");
  const ExperimentConfig config = BuildExperimentConfig(merged);
  CHECK(config.pipeline.budget.n_per_question() == 8);
  CHECK(config.pipeline.policy == Policy::kUniform);
}

TEST_CASE("experiment config keys") {
  ConfigStore s = ConfigStore::Parse(
      "pipeline.signal = vote_entropy\npipeline.exit = hard\npipeline.theta = 0.3\n"
      "pipeline.exit_mode = skip\nworld.prob_law = fixed(0.1,0.9)\nworld.m_questions = 7\n"
      "experiment.seeds = 5,9\nbackend.kind = sim\n");
  const ExperimentConfig c = BuildExperimentConfig(s);
  CHECK(c.pipeline.signal_kind == SignalKind::kVoteEntropy);
  CHECK(c.pipeline.phase1_samples_k == 2);
  CHECK(c.pipeline.threshold_exit.exit_kind == ExitKind::kHard);
  CHECK(c.pipeline.threshold_exit.mode == ExitMode::kSkip);
  CHECK(c.world.m_questions == 7);
  CHECK(c.seeds == std::vector<uint64_t>{5, 9});
  CHECK(KnownConfigKeys().size() == 28);
  s.Set("pipeline.unknown", "1");
  CHECK(ThrownCode([&] { BuildExperimentConfig(s); }) == ErrorCode::kConfig);
  ConfigStore bad;
  bad.Set("pipeline.n", "four");
  CHECK(ThrownCode([&] { BuildExperimentConfig(bad); }) == ErrorCode::kConfig);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("uab_harness_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> ReadLines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

ExperimentConfig SmallExperiment(const fs::path& out, Policy policy, int64_t n) {
  ExperimentConfig c;
  c.pipeline.policy = policy;
  c.pipeline.budget = BudgetSpec(n, 1);
  c.pipeline.parallelism = 2;
  c.world.m_questions = 80;
  c.world.rng_seed = 17;
  c.output_dir = out;
  return c;
}

TEST_CASE("experiment writes per-seed files and a consistent aggregate row") {
  TempDir tmp;
  const MetricReport report = RunExperiment(SmallExperiment(tmp.path, Policy::kUab, 4));
  CHECK(report.failed_seeds.empty());
  REQUIRE(report.seeds.size() == 3);
  const auto csv = ReadLines(tmp.path / "aggregate.csv");
  REQUIRE(csv.size() == 2);
  CHECK(csv[0] == kAggregateCsvHeader);
  std::vector<std::string> cells;
  std::stringstream row(csv[1]);
  for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
  REQUIRE(cells.size() == 7);
  CHECK(cells[0] == "uab");
  CHECK(cells[1] == "4");
  CHECK(cells[2] == "3");

  std::vector<double> per_seed;
  for (uint64_t seed : {0, 1, 2}) {
    const auto lines = ReadLines(tmp.path / ("uab_N4_seed" + std::to_string(seed) + ".jsonl"));
    REQUIRE(lines.size() == 80);
    double correct = 0;
    for (const auto& line : lines) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.contains("question_id"));
      CHECK(j.contains("p_i"));
      correct += j["correct"].get<bool>() ? 1 : 0;
    }
    per_seed.push_back(correct / 80.0);
  }
  CHECK(std::abs(std::stod(cells[3]) - Mean(per_seed)) < 1e-9);
  CHECK(std::abs(std::stod(cells[4]) - SampleStd(per_seed)) < 1e-9);
  CHECK(report.samples_issued == 3 * 320);
  CHECK(report.budget_saved_pct == 0.0);

  RunExperiment(SmallExperiment(tmp.path, Policy::kUniform, 4));
  CHECK(ReadLines(tmp.path / "aggregate.csv").size() == 3);
}

TEST_CASE("with one sample per question every policy gives the same answers") {
  TempDir tmp;
  std::vector<std::string> reference;
  for (Policy policy : {Policy::kUab, Policy::kUniform, Policy::kRandom, Policy::kLength}) {
    RunExperiment(SmallExperiment(tmp.path, policy, 1));
    std::vector<std::string> answers;
    for (const auto& line :
         ReadLines(tmp.path / (std::string(PolicyName(policy)) + "_N1_seed1.jsonl"))) {
      const auto j = nlohmann::json::parse(line);
      answers.push_back(j["final_answer"].get<std::string>());
    }
    if (reference.empty()) reference = answers;
    CHECK(answers == reference);
  }
}

TEST_CASE("saved budget percentage") {
  TempDir tmp;
  ExperimentConfig c = SmallExperiment(tmp.path, Policy::kUab, 4);
  c.pipeline.threshold_exit = {ExitKind::kEasy, 0.8, ExitMode::kSkip};
  const MetricReport r = RunExperiment(c);
  int64_t saved = 0, budget = 0, issued = 0;
  for (const auto& s : r.seeds) {
    saved += s.saved_units;
    budget += s.budget_effective;
    issued += s.samples_issued;
  }
  CHECK(saved > 0);
  CHECK(std::abs(r.budget_saved_pct - 100.0 * saved / budget) < 1e-9);
  CHECK(issued + saved == 3 * 320);
}

TEST_CASE("an unreachable endpoint yields abstentions, not a crash") {
  TempDir tmp;
  const fs::path questions = tmp.path / "q.jsonl";
  std::ofstream(questions) << R"({"id": "a", "prompt": "1+1?", "gold_answer": "2"})" "\n"
                           << R"({"id": "b", "prompt": "2+2?", "gold_answer": "4"})" "\n";
  ExperimentConfig c = SmallExperiment(tmp.path, Policy::kUniform, 2);
  c.backend = BackendKind::kHttp;
  c.questions_path = questions;
  c.http.endpoint = "http://127.0.0.1:1";
  c.http.max_retries = 0;
  c.seeds = {0};
  const MetricReport r = RunExperiment(c);
  REQUIRE(r.seeds.size() == 1);
  CHECK(r.seeds[0].accuracy == 0.0);
  for (const auto& line : ReadLines(tmp.path / "uniform_N2_seed0.jsonl")) {
    CHECK(nlohmann::json::parse(line)["final_answer"] == "");
  }
  c.questions_path.reset();
  CHECK(ThrownCode([&] { RunExperiment(c); }) == ErrorCode::kConfig);
}

std::vector<int64_t> LiteralExponentGreedy(std::span<const double> p, int64_t budget) {
  std::vector<int64_t> e(p.size(), 0);
  for (int64_t u = 0; u < budget; ++u) {
    size_t best = 0;
    double best_gain = -1.0;
    for (size_t i = 0; i < p.size(); ++i) {
      const double gain = p[i] * std::pow(1.0 - p[i], static_cast<double>(e[i]));
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    ++e[best];
  }
  return e;
}

TEST_CASE("verifier accepts the allocator and catches broken ones") {
  const ExtrasAllocator good = [](std::span<const double> p, int64_t b) {
    return GreedyExtras(p, b);
  };
  CHECK(CheckOracleEquivalence(good, 4, 8, 1).passed());
  CHECK(CheckKktRandom(good, 200, 1).passed());
  CHECK(CheckMatchesScan(good, 200, 1).passed());
  CHECK(CheckSensitivityBound(good, 200, 0.05, 1).passed());
  CHECK(CheckRegretBound(good, 100, 0.05, 1).passed());
  CHECK(CheckTelescoping(200, 1).passed());
  CHECK(CheckSimulatorInversion(100, 1).passed());

  const VerifyCheck literal = CheckOracleEquivalence(LiteralExponentGreedy, 4, 8, 1);
  CHECK_FALSE(literal.passed());
  CHECK(literal.failures > 0);
  CHECK_FALSE(CheckKktRandom(LiteralExponentGreedy, 200, 1).passed());

  const ExtrasAllocator short_by_one = [](std::span<const double> p, int64_t b) {
    return GreedyExtras(p, b > 0 ? b - 1 : 0);
  };
  CHECK_FALSE(CheckOracleEquivalence(short_by_one, 4, 8, 1).passed());
  CHECK_FALSE(CheckKktRandom(short_by_one, 200, 1).passed());

  const auto checks = RunVerifySuite();
  const std::string text = FormatVerifyReport(checks);
  for (const auto& c : checks) {
    CHECK_MESSAGE(c.passed(), c.name);
    CHECK(text.find(c.name) != std::string::npos);
  }
}

}  // namespace
}  // namespace uab
