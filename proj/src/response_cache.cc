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

#include "uab/response_cache.h"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "json.hpp"
#include "uab/errors.h"

namespace uab {
namespace {

using nlohmann::json;

std::string Sha256Hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

json SampleToJson(const BackendSample& sample) {
  return {{"text", sample.text},
          {"token_logprobs", sample.token_logprobs},
          {"finish_reason", FinishReasonName(sample.finish_reason)}};
}

BackendSample SampleFromJson(const json& j) {
  BackendSample sample;
  sample.text = j.at("text").get<std::string>();
  sample.token_logprobs = j.at("token_logprobs").get<std::vector<double>>();
  sample.finish_reason = ParseFinishReason(j.at("finish_reason").get<std::string>());
  return sample;
}

}  // namespace

std::string CacheKey(const CacheKeyParts& parts) {
  json j = {{"endpoint", parts.endpoint},
            {"model", parts.model},
            {"prompt", parts.prompt},
            {"temperature", parts.sampling_temperature},
            {"max_tokens", parts.max_tokens},
            {"logprobs", parts.want_logprobs},
            {"seed", parts.seed ? json(*parts.seed) : json(nullptr)},
            {"sample_index", parts.sample_index}};
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  return Sha256Hex(j.dump());
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create cache directory " + dir_.string() +
                                    ": " + ec.message());
  }
}

std::filesystem::path ResponseCache::PathFor(const std::string& key) const {
  return dir_ / (key + ".json");
}

std::optional<BackendSample> ResponseCache::Get(const std::string& key) {
  const auto path = PathFor(key);
  std::string contents;
  {
    std::lock_guard lock(mu_);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      ++misses_;
      return std::nullopt;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    contents = buffer.str();
  }
  try {
    BackendSample sample = SampleFromJson(json::parse(contents));
    ++hits_;
    return sample;
  } catch (const std::exception& e) {
    spdlog::warn("cache entry {} is corrupt ({}); treating as miss", path.string(),
                 e.what());
    ++misses_;
    return std::nullopt;
  }
}

void ResponseCache::Put(const std::string& key, const BackendSample& sample) {
  const auto path = PathFor(key);
  const std::string body = SampleToJson(sample).dump();
  std::lock_guard lock(mu_);
  if (std::filesystem::exists(path)) {
    ++overwrites_;
    spdlog::info("cache overwrite for key {}", key);
  }
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) throw Error(ErrorCode::kIo, "cannot write cache entry " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

BackendResponse CachingBackend::Generate(const BackendRequest& request) {
  CacheKeyParts parts{inner_.Endpoint(),          inner_.Model(),
                      request.prompt,             request.sampling_temperature,
                      request.max_tokens,         request.want_logprobs,
                      request.seed,               0};
  const auto n = static_cast<size_t>(request.sample_count);
  std::vector<std::string> keys(n);
  std::vector<std::optional<BackendSample>> slots(n);
  for (size_t k = 0; k < n; ++k) {
    parts.sample_index = request.first_sample_index + static_cast<int64_t>(k);
    keys[k] = CacheKey(parts);
    slots[k] = cache_.Get(keys[k]);
  }
  BackendResponse response;
  for (size_t k = 0; k < n;) {
    if (slots[k]) {
      ++k;
      continue;
    }
    size_t end = k;
    while (end < n && !slots[end]) ++end;
    BackendRequest sub = request;
    sub.first_sample_index = request.first_sample_index + static_cast<int64_t>(k);
    sub.sample_count = static_cast<int64_t>(end - k);
    BackendResponse fetched = inner_.Generate(sub);
    if (fetched.samples.size() != end - k) {
      throw Error(ErrorCode::kBackend, "backend returned " +
                                           std::to_string(fetched.samples.size()) +
                                           " samples, expected " +
                                           std::to_string(end - k));
    }
    response.retries += fetched.retries;
    response.logprobs_missing = response.logprobs_missing || fetched.logprobs_missing;
    for (size_t i = k; i < end; ++i) {
      BackendSample& sample = fetched.samples[i - k];
      if (sample.finish_reason != FinishReason::kError) cache_.Put(keys[i], sample);
      slots[i] = std::move(sample);
    }
    k = end;
  }
  for (auto& slot : slots) {
    if (request.want_logprobs && slot->token_logprobs.empty() &&
        slot->finish_reason != FinishReason::kError) {
      response.logprobs_missing = true;
    }
    response.samples.push_back(std::move(*slot));
  }
  return response;
}

}  // namespace uab
