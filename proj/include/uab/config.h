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

#ifndef UAB_CONFIG_H_
#define UAB_CONFIG_H_

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace uab {

// Flat key/value settings. The text form is one `section.key = value` per
// line; '#' starts a comment, blank lines are ignored and values are trimmed.
class ConfigStore {
 public:
  // Throws kConfig naming `origin` and the line on malformed input, and on
  // any key that looks like a credential.
  static ConfigStore Parse(std::string_view text, std::string_view origin = "<text>");
  static ConfigStore Load(const std::filesystem::path& path);

  using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
  // Reads EnvVarName(key) for each of `keys`.
  static ConfigStore FromEnv(std::span<const std::string_view> keys,
                             const EnvLookup& lookup);

  void Set(std::string key, std::string value);
  std::optional<std::string> Get(std::string_view key) const;
  // Copies every entry of `higher` over this store.
  void Overlay(const ConfigStore& higher);

  const std::map<std::string, std::string, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

// "world.noise_sigma" -> "UAB_WORLD_NOISE_SIGMA".
std::string EnvVarName(std::string_view key);

// Process environment lookup for ConfigStore::FromEnv.
std::optional<std::string> ProcessEnv(const std::string& name);

}  // namespace uab

#endif  // UAB_CONFIG_H_
