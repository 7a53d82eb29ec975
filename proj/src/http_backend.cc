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

#include "uab/http_backend.h"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "uab/errors.h"

namespace uab {
namespace {

using nlohmann::json;

std::string GetEnv(const char* name) {
  const char* value = std::getenv(name);
  return value ? std::string(value) : std::string();
}

bool Retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpBackendConfig HttpBackendConfig::FromEnv() {
  HttpBackendConfig config;
  config.endpoint = GetEnv(kEnvEndpoint);
  config.api_key = GetEnv(kEnvApiKey);
  config.model = GetEnv(kEnvModel);
  return config;
}

json BuildChatCompletionBody(const std::string& model, const BackendRequest& request) {
  json body = {
      {"model", model},
      {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"n", request.sample_count},
      {"temperature", request.sampling_temperature},
      {"max_tokens", request.max_tokens},
  };
  if (request.want_logprobs) body["logprobs"] = true;
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

BackendResponse ParseChatCompletionResponse(const json& body, bool want_logprobs) {
  BackendResponse response;
  if (!body.contains("choices") || !body["choices"].is_array()) {
    throw Error(ErrorCode::kBackend, "response has no choices array");
  }
  for (const auto& choice : body["choices"]) {
    BackendSample sample;
    const auto& message = choice.value("message", json::object());
    if (message.contains("content") && message["content"].is_string()) {
      sample.text = message["content"].get<std::string>();
    }
    std::string finish = "stop";
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
      finish = choice["finish_reason"].get<std::string>();
    }
    sample.finish_reason = finish == "length" ? FinishReason::kLength : FinishReason::kStop;
    if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
        choice["logprobs"].contains("content") &&
        choice["logprobs"]["content"].is_array()) {
      for (const auto& token : choice["logprobs"]["content"]) {
        if (token.contains("logprob") && token["logprob"].is_number()) {
          // Some servers report -0.0 or tiny positive rounding noise.
          sample.token_logprobs.push_back(std::min(0.0, token["logprob"].get<double>()));
        }
      }
    }
    if (want_logprobs && sample.token_logprobs.empty()) response.logprobs_missing = true;
    response.samples.push_back(std::move(sample));
  }
  return response;
}

HttpBackend::HttpBackend(HttpBackendConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (config_.endpoint.empty()) {
    throw Error(ErrorCode::kConfig, std::string("no endpoint configured; set ") +
                                        kEnvEndpoint);
  }
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  const size_t scheme_end = config_.endpoint.find("://");
  const size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const size_t path_start = config_.endpoint.find('/', host_start);
  scheme_host_port_ = config_.endpoint.substr(0, path_start);
  std::string prefix =
      path_start == std::string::npos ? "" : config_.endpoint.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix + "/v1/chat/completions";
  in_flight_ = std::make_unique<std::counting_semaphore<>>(
      std::max(1, config_.max_in_flight));
}

HttpBackend::~HttpBackend() = default;

BackendResponse HttpBackend::Generate(const BackendRequest& request) {
  const std::string payload = BuildChatCompletionBody(config_.model, request).dump();
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  in_flight_->acquire();
  struct Release {
    std::counting_semaphore<>* sem;
    ~Release() { sem->release(); }
  } release{in_flight_.get()};

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);

  std::chrono::milliseconds backoff = config_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      spdlog::warn("retry {}/{} for '{}' after: {}", attempt, config_.max_retries,
                   request.question_id, last_error);
    }
    auto result = client.Post(path_, headers, payload, "application/json");
    std::chrono::milliseconds wait = backoff;
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
    } else if (result->status == 200) {
      json body;
      try {
        body = json::parse(result->body);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::kBackend, std::string("malformed response body: ") + e.what());
      }
      BackendResponse response = ParseChatCompletionResponse(body, request.want_logprobs);
      if (response.samples.size() != static_cast<size_t>(request.sample_count)) {
        throw Error(ErrorCode::kBackend,
                    "endpoint returned " + std::to_string(response.samples.size()) +
                        " choices, requested " + std::to_string(request.sample_count));
      }
      response.retries = attempt;
      if (attempt > 0) {
        spdlog::info("request for '{}' succeeded after {} retries", request.question_id,
                     attempt);
      }
      if (response.logprobs_missing) {
        spdlog::warn("endpoint returned no token logprobs for '{}'", request.question_id);
      }
      return response;
    } else if (Retryable(result->status)) {
      last_error = "HTTP " + std::to_string(result->status);
      if (result->status == 429 && result->has_header("Retry-After")) {
        try {
          wait = std::chrono::seconds(std::stol(result->get_header_value("Retry-After")));
        } catch (const std::exception&) {
          // HTTP-date form; fall back to the computed backoff.
        }
      }
    } else {
      throw Error(ErrorCode::kBackend, "HTTP " + std::to_string(result->status) + ": " +
                                           result->body.substr(0, 512));
    }
    if (attempt == config_.max_retries) break;
    sleeper_(std::min(wait, config_.max_backoff));
    backoff = std::min(backoff * 2, config_.max_backoff);
  }
  throw Error(ErrorCode::kBackend, "giving up after " +
                                       std::to_string(config_.max_retries) +
                                       " retries: " + last_error);
}

}  // namespace uab
