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

#ifndef UAB_HTTP_BACKEND_H_
#define UAB_HTTP_BACKEND_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <semaphore>
#include <string>

#include "json.hpp"
#include "uab/backend.h"

namespace uab {

inline constexpr char kEnvEndpoint[] = "UAB_HTTP_ENDPOINT";
inline constexpr char kEnvApiKey[] = "UAB_API_KEY";
inline constexpr char kEnvModel[] = "UAB_HTTP_MODEL";

struct HttpBackendConfig {
  // Scheme, host and optional port, e.g. "http://localhost:8000". The request
  // path is /v1/chat/completions under any path prefix given here.
  std::string endpoint;
  std::string api_key;
  std::string model;
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{30000};
  int max_in_flight = 8;
  std::chrono::seconds timeout{300};

  // Fills endpoint, model and api_key from the environment; the key is only
  // ever read from there.
  static HttpBackendConfig FromEnv();
};

nlohmann::json BuildChatCompletionBody(const std::string& model,
                                       const BackendRequest& request);

// Maps the choices of a chat-completions response. Token logprobs come from
// choices[i].logprobs.content[j].logprob; `logprobs_missing` is set when they
// were requested but absent.
BackendResponse ParseChatCompletionResponse(const nlohmann::json& body,
                                            bool want_logprobs);

// Client for OpenAI-compatible chat-completions endpoints. Retries transport
// failures, 429 and 5xx with exponential backoff, honoring Retry-After.
class HttpBackend : public Backend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpBackend(HttpBackendConfig config, Sleeper sleeper = {});
  ~HttpBackend() override;

  BackendResponse Generate(const BackendRequest& request) override;
  std::string Endpoint() const override { return config_.endpoint; }
  std::string Model() const override { return config_.model; }

 private:
  HttpBackendConfig config_;
  Sleeper sleeper_;
  std::string scheme_host_port_;
  std::string path_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace uab

#endif  // UAB_HTTP_BACKEND_H_
