// Copyright 2026 The SCS Authors
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

#include "scs_cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>

#include "scs/error.hpp"

namespace scs::cli {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  fail(ErrorCode::kInvalidArgument, "config key '" + key + "' = '" + value + "' is not " + want);
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& origin) {
  Config cfg;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        fail(ErrorCode::kInvalidArgument,
             origin + ":" + std::to_string(line_no) + ": bad section header");
      }
      section = lower(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kInvalidArgument,
           origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = lower(trim(line.substr(0, eq)));
    if (key.empty()) {
      fail(ErrorCode::kInvalidArgument, origin + ":" + std::to_string(line_no) + ": empty key");
    }
    cfg.values_[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kInvalidArgument, "cannot open config file '" + path.string() + "'");
  return parse(in, path.string());
}

void Config::apply_env(char** env) {
  if (!env) return;
  constexpr std::string_view kPrefix = "SCS_";
  for (char** e = env; *e; ++e) {
    std::string_view entry(*e);
    if (entry.substr(0, kPrefix.size()) != kPrefix) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    auto name = lower(std::string(entry.substr(kPrefix.size(), eq - kPrefix.size())));
    const auto value = std::string(entry.substr(eq + 1));
    const auto us = name.find('_');
    // SCS_SEED -> run.seed; SCS_KMEANS_NUM_CLUSTERS -> kmeans.num_clusters
    const auto key =
        us == std::string::npos ? "run." + name : name.substr(0, us) + "." + name.substr(us + 1);
    values_[key] = value;
  }
}

void Config::apply_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail(ErrorCode::kInvalidArgument, "expected section.key=value, got '" + assignment + "'");
  }
  values_[lower(trim(assignment.substr(0, eq)))] = trim(assignment.substr(eq + 1));
}

std::optional<std::string> Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::string Config::require_string(const std::string& key) const {
  auto v = get(key);
  if (!v || v->empty())
    fail(ErrorCode::kInvalidArgument, "missing required config key '" + key + "'");
  return *v;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size() || v->empty())
    bad_value(key, *v, "a number");
  return out;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size() || v->empty()) {
    bad_value(key, *v, "a nonnegative integer");
  }
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  const auto s = lower(*v);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  bad_value(key, *v, "a boolean");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  std::vector<std::string> out;
  auto v = get(key);
  if (!v) return out;
  std::size_t start = 0;
  while (start <= v->size()) {
    auto comma = v->find(',', start);
    if (comma == std::string::npos) comma = v->size();
    auto item = trim(v->substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

}  // namespace scs::cli
