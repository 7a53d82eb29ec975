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

#ifndef UAB_BACKEND_H_
#define UAB_BACKEND_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uab/types.h"

namespace uab {

inline constexpr double kDefaultSamplingTemperature = 0.9;
inline constexpr int64_t kDefaultMaxTokens = 1024;

struct BackendRequest {
  std::string question_id;
  std::string prompt;
  int64_t sample_count = 1;
  // Index of the first requested sample within the question's sample
  // sequence. Backends that can be seeded per sample use it for replay.
  int64_t first_sample_index = 0;
  double sampling_temperature = kDefaultSamplingTemperature;
  int64_t max_tokens = kDefaultMaxTokens;
  bool want_logprobs = true;
  std::optional<uint64_t> seed;
};

struct BackendSample {
  std::string text;
  std::vector<double> token_logprobs;
  FinishReason finish_reason = FinishReason::kStop;

  bool operator==(const BackendSample&) const = default;
};

struct BackendResponse {
  std::vector<BackendSample> samples;
  // Logprobs were requested but the endpoint returned none.
  bool logprobs_missing = false;
  int retries = 0;
};

// Source of model generations. Implementations must be safe for concurrent
// Generate calls. Failures throw Error(kBackend) or kUnknownQuestion.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendResponse Generate(const BackendRequest& request) = 0;

  // Endpoint and model identity, used to namespace cached responses.
  virtual std::string Endpoint() const = 0;
  virtual std::string Model() const = 0;
};

}  // namespace uab

#endif  // UAB_BACKEND_H_
