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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "scs/agent.hpp"
#include "scs/features.hpp"
#include "scs/oracle.hpp"
#include "scs/pool.hpp"

namespace scs {

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 8;
  double lr0 = 1e-3;
  std::size_t lr_halving_period = 5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  // Global L2 clip applied to the batch gradient; 0 disables.
  double clip_norm = 0.0;
};

void validate(const TrainConfig& cfg);

/// lr0 * 0.5^floor(epoch / lr_halving_period).
double lr_schedule(std::size_t epoch, const TrainConfig& cfg);

struct AdamState {
  AgentParams m;
  AgentParams v;
  std::uint64_t step = 0;

  static AdamState for_params(const AgentParams& params);
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(AgentParams& params, const AgentParams& grad, AdamState& state, double lr,
               const TrainConfig& cfg);

/// Surrogate loss L = -(1/P) sum_m (u_m - u_avg) log a_m over the pool, where
/// a = softmax(scores).
double reinforce_loss(std::span<const double> scores, const RewardRecord& rewards);

/// dL/d(scores) for the loss above: -(1/P) (adv_j - a_j * sum(adv)).
std::vector<double> reinforce_score_gradient(std::span<const double> scores,
                                             const RewardRecord& rewards);

struct PolicyGradient {
  AgentParams grad;
  double loss = 0.0;
  std::vector<double> probs;
};

/// Exact gradient of the surrogate loss with respect to every agent weight,
/// backpropagated through log-softmax and the MLP.
PolicyGradient reinforce_gradient(const AgentParams& params, const CandidatePool& pool,
                                  const FeatureVector& query, const RewardRecord& rewards);

/// The surrogate loss evaluated through a full forward pass.
double reinforce_loss(const AgentParams& params, const CandidatePool& pool,
                      const FeatureVector& query, const RewardRecord& rewards);

struct EpochStats {
  std::size_t epoch = 0;
  double lr = 0.0;
  double mean_loss = 0.0;
  double mean_top1_reward = 0.0;
};

struct TrainReport {
  double initial_mean_top1_reward = 0.0;
  std::vector<EpochStats> epochs;
  std::uint64_t params_checksum = 0;
};

bool operator==(const EpochStats& a, const EpochStats& b);
bool operator==(const TrainReport& a, const TrainReport& b);

struct TrainResult {
  AgentParams params;
  TrainReport report;
};

using EpochCallback = std::function<void(const EpochStats&, const AgentParams&)>;

/// REINFORCE training over full-pool rewards. Each epoch visits the queries
/// in a seeded shuffle, in batches of batch_size; each batch applies one Adam
/// step with the mean per-query gradient. Rewards are fetched once per query.
TrainResult train_agent(const FeatureSet& queries, const CandidatePool& pool, const Oracle& oracle,
                        const TrainConfig& cfg, const AgentConfig& agent_cfg,
                        const EpochCallback& on_epoch = {});

/// Mean over queries of the reward earned by the agent's top-1 pick.
double mean_top1_reward(const AgentParams& params, const CandidatePool& pool,
                        const FeatureSet& queries, std::span<const RewardRecord> rewards);

/// CSV: epoch,lr,mean_loss,mean_top1_reward
void write_report_csv(std::ostream& out, const TrainReport& report);

}  // namespace scs
