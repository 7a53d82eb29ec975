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

// uab: allocation, pipeline runs, simulation studies, curve inversion and
// the property suite from one binary.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "uab/allocation.h"
#include "uab/config.h"
#include "uab/coverage.h"
#include "uab/errors.h"
#include "uab/experiment.h"
#include "uab/judge.h"
#include "uab/pchip.h"
#include "uab/signals.h"
#include "uab/verify.h"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Flags shared by the subcommands that build an ExperimentConfig.
struct CommonFlags {
  std::string config_path;
  std::vector<uint64_t> seeds;
  std::string policy;
  int64_t n = 0;
  double temperature = 0.0;
  std::string signal;
  std::string exit_kind;
  double theta = 0.0;
  std::string exit_mode;
  std::string backend;
  std::string out;
  std::vector<std::string> overrides;
};

void AddCommonFlags(CLI::App& app, CommonFlags& f) {
  app.add_option("--config", f.config_path, "key = value settings file");
  app.add_option("--seed", f.seeds, "run seed (repeatable)");
  app.add_option("--policy", f.policy, "uab, uniform, random, length or llm_judge");
  app.add_option("--n", f.n, "samples per question N");
  app.add_option("--temperature", f.temperature, "allocator temperature T");
  app.add_option("--signal", f.signal, "difficulty signal");
  app.add_option("--exit", f.exit_kind, "none, hard or easy");
  app.add_option("--theta", f.theta, "threshold-exit cutoff");
  app.add_option("--exit-mode", f.exit_mode, "redistribute or skip");
  app.add_option("--backend", f.backend, "sim or http");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--set", f.overrides, "extra key=value setting (repeatable)");
}

// Layers defaults < file < environment < command line.
uab::ConfigStore MergeSettings(const CommonFlags& f, CLI::App& app) {
  uab::ConfigStore settings;
  if (!f.config_path.empty()) settings = uab::ConfigStore::Load(f.config_path);
  settings.Overlay(uab::ConfigStore::FromEnv(uab::KnownConfigKeys(), uab::ProcessEnv));

  uab::ConfigStore cli;
  auto set_if = [&](const char* flag, const char* key, const std::string& value) {
    if (app.count(flag) > 0) cli.Set(key, value);
  };
  set_if("--policy", "pipeline.policy", f.policy);
  set_if("--n", "pipeline.n", std::to_string(f.n));
  set_if("--signal", "pipeline.signal", f.signal);
  set_if("--exit", "pipeline.exit", f.exit_kind);
  set_if("--exit-mode", "pipeline.exit_mode", f.exit_mode);
  set_if("--backend", "backend.kind", f.backend);
  set_if("--out", "experiment.out", f.out);
  if (app.count("--temperature") > 0) {
    std::ostringstream s;
    s.precision(17);
    s << f.temperature;
    cli.Set("pipeline.temperature", s.str());
  }
  if (app.count("--theta") > 0) {
    std::ostringstream s;
    s.precision(17);
    s << f.theta;
    cli.Set("pipeline.theta", s.str());
  }
  if (!f.seeds.empty()) {
    std::string joined;
    for (uint64_t s : f.seeds) joined += (joined.empty() ? "" : ",") + std::to_string(s);
    cli.Set("experiment.seeds", joined);
  }
  for (const auto& kv : f.overrides) {
    cli.Overlay(uab::ConfigStore::Parse(kv, "--set"));
  }
  settings.Overlay(cli);
  return settings;
}

int CmdAllocate(const std::string& scores_path, const std::string& out_path,
                const CommonFlags& f, CLI::App& app) {
  const uab::ExperimentConfig config = uab::BuildExperimentConfig(MergeSettings(f, app));
  const uab::PipelineConfig& p = config.pipeline;
  std::ifstream in(scores_path);
  if (!in) throw uab::Error(uab::ErrorCode::kIo, "cannot read scores " + scores_path);
  uab::ProbTable probs;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json row = json::parse(line);
    const std::string id = row.at("id").get<std::string>();
    if (row.contains("p")) {
      probs.Add(id, row["p"].get<double>());
    } else if (row.contains("score")) {
      probs.Add(id, uab::ScoreToProb(row["score"].get<double>(), p.budget.temperature()));
    } else {
      throw uab::Error(uab::ErrorCode::kValidation,
                       scores_path + ":" + std::to_string(line_no) + ": need score or p");
    }
  }
  if (probs.empty()) throw uab::Error(uab::ErrorCode::kEmptyInput, "no scores");

  const uab::BudgetSpec budget(p.budget.n_per_question(), static_cast<int64_t>(probs.size()),
                               p.budget.temperature());
  const uab::ThresholdExitResult result =
      uab::ApplyThresholdExits(probs, budget.effective(), p.threshold_exit);

  std::ofstream file;
  if (!out_path.empty()) file.open(out_path, std::ios::binary | std::ios::trunc);
  std::ostream& out = out_path.empty() ? std::cout : file;
  for (size_t i = 0; i < probs.size(); ++i) {
    ordered_json row;
    row["question_id"] = probs.id(i);
    row["p_i"] = probs.p(i);
    row["extras"] = result.alloc.extras[i];
    row["samples"] = 1 + result.alloc.extras[i];
    out << row.dump() << '\n';
  }
  spdlog::info("M={} B_eff={} allocated={} saved={} J={:.6f}", probs.size(),
               budget.effective(), result.alloc.Allocated(), result.saved_units,
               uab::CoverageObjective(result.alloc, probs));
  return 0;
}

int CmdRun(const CommonFlags& f, CLI::App& app, bool force_sim,
           const std::vector<std::string>& policies) {
  uab::ConfigStore settings = MergeSettings(f, app);
  if (force_sim) settings.Set("backend.kind", "sim");
  std::vector<std::string> to_run = policies;
  if (to_run.empty()) to_run.push_back(settings.Get("pipeline.policy").value_or("uab"));

  int status = 0;
  for (const auto& policy : to_run) {
    settings.Set("pipeline.policy", policy);
    const uab::ExperimentConfig config = uab::BuildExperimentConfig(settings);
    const uab::MetricReport report = uab::RunExperiment(config);
    std::cout << uab::ReportToJson(report).dump() << '\n';
    if (!report.failed_seeds.empty() || report.seeds.empty()) status = 1;
  }
  return status;
}

std::vector<std::pair<double, double>> ReadCurve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw uab::Error(uab::ErrorCode::kIo, "cannot read curve " + path);
  std::vector<std::pair<double, double>> points;
  std::string line;
  while (std::getline(in, line)) {
    const size_t comma = line.find(',');
    if (comma == std::string::npos) continue;
    try {
      points.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::invalid_argument&) {
      // Header row.
    }
  }
  return points;
}

int CmdInvert(const std::vector<std::string>& point_flags, const std::string& curve_path,
              const std::vector<double>& targets) {
  std::vector<std::pair<double, double>> points;
  if (!curve_path.empty()) points = ReadCurve(curve_path);
  for (const auto& point : point_flags) {
    const size_t colon = point.find(':');
    if (colon == std::string::npos) {
      throw uab::Error(uab::ErrorCode::kValidation, "--point wants N:accuracy, got " + point);
    }
    points.emplace_back(std::stod(point.substr(0, colon)), std::stod(point.substr(colon + 1)));
  }
  std::cout << "target,min_n\n";
  for (const auto& row : uab::MinBudgetCurve(points, targets)) {
    if (row.min_budget) {
      std::printf("%.10g,%.10g\n", row.target, *row.min_budget);
    } else {
      std::printf("%.10g,none\n", row.target);
    }
  }
  return 0;
}

int CmdVerify(uint64_t seed) {
  uab::VerifyOptions options;
  options.seed = seed;
  const auto checks = uab::RunVerifySuite(options);
  std::cout << uab::FormatVerifyReport(checks);
  for (const auto& c : checks) {
    if (!c.passed()) return 1;
  }
  return 0;
}

int CmdJudge(const CommonFlags& f, CLI::App& app, const std::string& out_path) {
  const uab::ExperimentConfig config = uab::BuildExperimentConfig(MergeSettings(f, app));
  std::vector<uab::QuestionRecord> questions;
  std::optional<uab::SimulatedWorld> world;
  std::unique_ptr<uab::Backend> backend;
  if (config.backend == uab::BackendKind::kSimulated) {
    world = uab::SimulatedWorld::Build(config.world);
    questions = world->questions;
    backend = std::make_unique<uab::SimulatedBackend>(*world, config.seeds.front());
  } else {
    if (!config.questions_path) {
      throw uab::Error(uab::ErrorCode::kConfig, "judge over http needs input.questions");
    }
    questions = uab::LoadQuestionsJsonl(*config.questions_path);
    backend = std::make_unique<uab::HttpBackend>(config.http);
  }
  std::ofstream file;
  if (!out_path.empty()) file.open(out_path, std::ios::binary | std::ios::trunc);
  std::ostream& out = out_path.empty() ? std::cout : file;
  int64_t hard = 0;
  for (const auto& q : questions) {
    const uab::JudgeLabel label = uab::JudgeClassify(q, *backend);
    hard += label == uab::JudgeLabel::kHard ? 1 : 0;
    ordered_json row;
    row["question_id"] = q.id;
    row["label"] = std::string(uab::JudgeLabelName(label));
    out << row.dump() << '\n';
  }
  spdlog::info("{} of {} questions labelled hard", hard, questions.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("uab"));

  CLI::App app{"Uncertainty-aware sampling budget allocation"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn or error");

  CommonFlags allocate_flags, run_flags, sim_flags, judge_flags;
  std::string scores_path, allocate_out, judge_out, curve_path;
  std::vector<std::string> sim_policies, point_flags;
  std::vector<double> targets;
  uint64_t verify_seed = 0;

  CLI::App* allocate = app.add_subcommand("allocate", "allocate a budget from a scores file");
  AddCommonFlags(*allocate, allocate_flags);
  allocate->add_option("--scores", scores_path, "JSONL of {id, score} or {id, p}")->required();
  allocate->add_option("--alloc-out", allocate_out, "allocation JSONL (default stdout)");

  CLI::App* run = app.add_subcommand("run", "run the two-phase pipeline once per seed");
  AddCommonFlags(*run, run_flags);

  CLI::App* simulate = app.add_subcommand("simulate", "compare policies in the simulated world");
  AddCommonFlags(*simulate, sim_flags);
  simulate->add_option("--policies", sim_policies, "policies to compare")
      ->delimiter(',')
      ->default_val(std::vector<std::string>{"uab", "uniform", "random", "length"});

  CLI::App* invert = app.add_subcommand("invert", "minimum budget reaching target accuracies");
  invert->add_option("--point", point_flags, "N:accuracy knot (repeatable)");
  invert->add_option("--curve", curve_path, "CSV of N,accuracy");
  invert->add_option("--target", targets, "target accuracy (repeatable)")->required();

  CLI::App* verify = app.add_subcommand("verify", "run the allocator property suite");
  verify->add_option("--seed", verify_seed, "suite seed");

  CLI::App* judge = app.add_subcommand("judge", "label questions easy or hard");
  AddCommonFlags(*judge, judge_flags);
  judge->add_option("--labels-out", judge_out, "labels JSONL (default stdout)");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*allocate) return CmdAllocate(scores_path, allocate_out, allocate_flags, *allocate);
    if (*run) return CmdRun(run_flags, *run, false, {});
    if (*simulate) return CmdRun(sim_flags, *simulate, true, sim_policies);
    if (*invert) return CmdInvert(point_flags, curve_path, targets);
    if (*verify) return CmdVerify(verify_seed);
    if (*judge) return CmdJudge(judge_flags, *judge, judge_out);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
