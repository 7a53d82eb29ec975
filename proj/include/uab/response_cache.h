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

#ifndef UAB_RESPONSE_CACHE_H_
#define UAB_RESPONSE_CACHE_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "uab/backend.h"

namespace uab {

struct CacheKeyParts {
  std::string endpoint;
  std::string model;
  std::string prompt;
  double sampling_temperature = kDefaultSamplingTemperature;
  int64_t max_tokens = kDefaultMaxTokens;
  bool want_logprobs = true;
  std::optional<uint64_t> seed;
  int64_t sample_index = 0;
};

// Hex SHA-256 over a canonical JSON encoding of the parts.
std::string CacheKey(const CacheKeyParts& parts);

// Content-addressed store of single samples, one JSON file per key under
// `dir`. Unreadable or malformed entries are reported as misses.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<BackendSample> Get(const std::string& key);
  // Last write wins; overwriting an existing entry is logged and counted.
  void Put(const std::string& key, const BackendSample& sample);

  int64_t hits() const { return hits_; }
  int64_t misses() const { return misses_; }
  int64_t overwrites() const { return overwrites_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path PathFor(const std::string& key) const;

  std::filesystem::path dir_;
  std::mutex mu_;
  std::atomic<int64_t> hits_{0};
  std::atomic<int64_t> misses_{0};
  std::atomic<int64_t> overwrites_{0};
};

// Serves samples from the cache and forwards contiguous runs of misses to the
// wrapped backend, storing what comes back.
class CachingBackend : public Backend {
 public:
  CachingBackend(Backend& inner, ResponseCache& cache)
      : inner_(inner), cache_(cache) {}

  BackendResponse Generate(const BackendRequest& request) override;
  std::string Endpoint() const override { return inner_.Endpoint(); }
  std::string Model() const override { return inner_.Model(); }

 private:
  Backend& inner_;
  ResponseCache& cache_;
};

}  // namespace uab

#endif  // UAB_RESPONSE_CACHE_H_
