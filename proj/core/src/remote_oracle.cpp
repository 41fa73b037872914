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

#include "scs/remote_oracle.hpp"

#include <cmath>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "scs/error.hpp"

namespace scs {

namespace {

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& sem_;
};

}  // namespace

RemoteOracle::RemoteOracle(RemoteOracleConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.endpoint.empty()) fail(ErrorCode::kInvalidArgument, "remote oracle endpoint is empty");
  if (cfg_.max_in_flight == 0 || cfg_.max_in_flight > 1024) {
    fail(ErrorCode::kInvalidArgument, "remote oracle max_in_flight must be in [1, 1024]");
  }
  while (!cfg_.endpoint.empty() && cfg_.endpoint.back() == '/') cfg_.endpoint.pop_back();
  slots_ = std::make_unique<std::counting_semaphore<1024>>(
      static_cast<std::ptrdiff_t>(cfg_.max_in_flight));
}

RemoteOracle::~RemoteOracle() = default;

std::size_t RemoteOracle::attempts() const noexcept { return attempts_.load(); }

double RemoteOracle::score(const std::string& query_id, const std::string& candidate_id) const {
  const std::string ids[1] = {candidate_id};
  return score_many(query_id, ids).front();
}

std::vector<double> RemoteOracle::score_many(const std::string& query_id,
                                             std::span<const std::string> candidate_ids) const {
  if (candidate_ids.empty()) return {};
  nlohmann::json body;
  auto& pairs = body["pairs"];
  pairs = nlohmann::json::array();
  for (const auto& c : candidate_ids) {
    pairs.push_back({{"query_id", query_id}, {"candidate_id", c}});
  }
  const std::string payload = body.dump();

  SlotGuard guard(*slots_);
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(cfg_.retry_backoff * attempt);
    ++attempts_;
    httplib::Client client(cfg_.endpoint);
    client.set_connection_timeout(cfg_.timeout);
    client.set_read_timeout(cfg_.timeout);
    client.set_write_timeout(cfg_.timeout);
    auto res = client.Post("/v1/score", payload, "application/json");
    if (!res) {
      last_error = "request to " + cfg_.endpoint + " failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server returned HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      fail(ErrorCode::kTransport, "server returned HTTP " + std::to_string(res->status));
    }

    std::vector<double> ious;
    try {
      const auto doc = nlohmann::json::parse(res->body);
      const auto& arr = doc.at("ious");
      if (!arr.is_array()) throw std::runtime_error("'ious' is not an array");
      for (const auto& v : arr) {
        if (!v.is_number()) throw std::runtime_error("non-numeric IoU");
        ious.push_back(v.get<double>());
      }
    } catch (const std::exception& e) {
      fail(ErrorCode::kTransport, std::string("malformed response body: ") + e.what());
    }
    if (ious.size() != candidate_ids.size()) {
      fail(ErrorCode::kTransport, "response has " + std::to_string(ious.size()) + " IoUs for " +
                                      std::to_string(candidate_ids.size()) + " pairs");
    }
    for (std::size_t i = 0; i < ious.size(); ++i) {
      if (!std::isfinite(ious[i]) || ious[i] < 0.0 || ious[i] > 1.0) {
        fail(ErrorCode::kOutOfRange, "remote IoU " + std::to_string(ious[i]) +
                                         " outside [0,1] for (query '" + query_id +
                                         "', candidate '" + candidate_ids[i] + "')");
      }
    }
    return ious;
  }
  fail(ErrorCode::kTransport,
       last_error + " after " + std::to_string(cfg_.max_retries + 1) + " attempts");
}

}  // namespace scs
