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

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

#include "scs/oracle.hpp"

namespace scs {

struct RemoteOracleConfig {
  // Base URL, e.g. "http://127.0.0.1:8080". Requests go to POST /v1/score.
  std::string endpoint;
  std::chrono::milliseconds timeout{30000};
  // Additional attempts after the first for connection failures and 5xx.
  std::size_t max_retries = 3;
  std::chrono::milliseconds retry_backoff{100};
  std::size_t max_in_flight = 4;
  bool deterministic = true;
};

/// Client for a JSON-over-HTTP scoring service:
///
///   POST /v1/score  {"pairs": [{"query_id": "...", "candidate_id": "..."}, ...]}
///   200             {"ious": [0.42, ...]}   (aligned with "pairs")
///
/// Any other status, a malformed body, or a length mismatch is a transport
/// error. Scores outside [0, 1] are rejected, never clamped.
class RemoteOracle final : public Oracle {
 public:
  explicit RemoteOracle(RemoteOracleConfig cfg);
  ~RemoteOracle() override;

  OracleCapabilities capabilities() const override { return {cfg_.deterministic, true}; }
  std::string identity() const override { return "remote:" + cfg_.endpoint; }
  double score(const std::string& query_id, const std::string& candidate_id) const override;
  std::vector<double> score_many(const std::string& query_id,
                                 std::span<const std::string> candidate_ids) const override;

  /// Number of HTTP attempts made so far, including retries.
  std::size_t attempts() const noexcept;

 private:
  RemoteOracleConfig cfg_;
  std::unique_ptr<std::counting_semaphore<1024>> slots_;
  mutable std::atomic<std::size_t> attempts_{0};
};

}  // namespace scs
