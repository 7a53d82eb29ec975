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

#include "uab/config.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "uab/errors.h"

namespace uab {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool LooksLikeCredential(std::string_view key) {
  std::string lower(key);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (std::string_view marker : {"api_key", "apikey", "secret", "password", "credential", "auth"}) {
    if (lower.find(marker) != std::string::npos) return true;
  }
  return false;
}

bool ValidKey(std::string_view key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  return std::all_of(key.begin(), key.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.';
  });
}

}  // namespace

ConfigStore ConfigStore::Parse(std::string_view text, std::string_view origin) {
  ConfigStore store;
  std::istringstream in{std::string(text)};
  std::string raw;
  for (int line_no = 1; std::getline(in, raw); ++line_no) {
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfig, where + ": expected key = value");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    if (!ValidKey(key)) {
      throw Error(ErrorCode::kConfig, where + ": bad key '" + std::string(key) + "'");
    }
    if (LooksLikeCredential(key)) {
      throw Error(ErrorCode::kConfig, where + ": credentials are read from the " +
                                          "environment only, not config files");
    }
    store.Set(std::string(key), std::string(Trim(line.substr(eq + 1))));
  }
  return store;
}

ConfigStore ConfigStore::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return Parse(text.str(), path.string());
}

ConfigStore ConfigStore::FromEnv(std::span<const std::string_view> keys,
                                 const EnvLookup& lookup) {
  ConfigStore store;
  for (std::string_view key : keys) {
    if (auto value = lookup(EnvVarName(key))) store.Set(std::string(key), *value);
  }
  return store;
}

void ConfigStore::Set(std::string key, std::string value) {
  entries_[std::move(key)] = std::move(value);
}

std::optional<std::string> ConfigStore::Get(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ConfigStore::Overlay(const ConfigStore& higher) {
  for (const auto& [k, v] : higher.entries_) entries_[k] = v;
}

std::string EnvVarName(std::string_view key) {
  std::string name = "UAB_";
  for (char c : key) {
    name += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return name;
}

std::optional<std::string> ProcessEnv(const std::string& name) {
  const char* value = std::getenv(name.c_str());
  if (value == nullptr) return std::nullopt;
  return std::string(value);
}

}  // namespace uab
