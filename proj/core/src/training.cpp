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

#include "scs/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "io_util.hpp"
#include "scs/error.hpp"
#include "scs/rng.hpp"

namespace scs {

namespace {

void check_aligned(std::size_t pool_size, const RewardRecord& rewards) {
  if (rewards.ious.size() != pool_size) {
    fail(ErrorCode::kShapeMismatch, "reward record for '" + rewards.query_id + "' has " +
                                        std::to_string(rewards.ious.size()) +
                                        " entries for a pool of " + std::to_string(pool_size));
  }
  if (pool_size < 2) fail(ErrorCode::kInvalidArgument, "policy gradient needs a pool of >= 2");
}

std::vector<double> advantages(const RewardRecord& rewards) {
  std::vector<double> adv(rewards.ious.size());
  for (std::size_t i = 0; i < adv.size(); ++i) adv[i] = rewards.ious[i] - rewards.avg;
  return adv;
}

std::vector<double> log_softmax(std::span<const double> scores) {
  const double mx = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double s : scores) z += std::exp(s - mx);
  const double log_z = std::log(z);
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] - mx - log_z;
  return out;
}

void for_each_pair(AgentParams& a, const AgentParams& b,
                   const std::function<void(double&, double)>& fn) {
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    for (std::size_t i = 0; i < a.layers[l].weights.size(); ++i) {
      fn(a.layers[l].weights[i], b.layers[l].weights[i]);
    }
    for (std::size_t i = 0; i < a.layers[l].bias.size(); ++i) {
      fn(a.layers[l].bias[i], b.layers[l].bias[i]);
    }
  }
}

void scale(AgentParams& p, double s) {
  for (auto& l : p.layers) {
    for (auto& w : l.weights) w *= s;
    for (auto& b : l.bias) b *= s;
  }
}

double squared_norm(const AgentParams& p) {
  double s = 0.0;
  for (const auto& l : p.layers) {
    for (double w : l.weights) s += w * w;
    for (double b : l.bias) s += b * b;
  }
  return s;
}

std::size_t top1_index(std::span<const double> scores, const std::vector<std::string>& ids) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best] || (scores[i] == scores[best] && ids[i] < ids[best])) best = i;
  }
  return best;
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (cfg.batch_size == 0) fail(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  if (!(cfg.lr0 > 0.0)) fail(ErrorCode::kInvalidArgument, "lr0 must be > 0");
  if (cfg.lr_halving_period == 0)
    fail(ErrorCode::kInvalidArgument, "lr_halving_period must be >= 1");
  if (!(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0) ||
      !(cfg.adam_beta2 >= 0.0 && cfg.adam_beta2 < 1.0) || !(cfg.adam_eps > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "Adam betas must lie in [0,1) and eps must be > 0");
  }
  if (!(cfg.clip_norm >= 0.0)) fail(ErrorCode::kInvalidArgument, "clip_norm must be >= 0");
}

double lr_schedule(std::size_t epoch, const TrainConfig& cfg) {
  const auto halvings = static_cast<int>(epoch / cfg.lr_halving_period);
  return std::ldexp(cfg.lr0, -halvings);
}

AdamState AdamState::for_params(const AgentParams& params) {
  return AdamState{zeros_like(params), zeros_like(params), 0};
}

void adam_step(AgentParams& params, const AgentParams& grad, AdamState& state, double lr,
               const TrainConfig& cfg) {
  if (!same_shape(params, grad) || !same_shape(params, state.m) || !same_shape(params, state.v)) {
    fail(ErrorCode::kShapeMismatch, "Adam step on mismatched parameter shapes");
  }
  ++state.step;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                      std::vector<double>& v) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        const double m_hat = m[i] / c1;
        const double v_hat = v[i] / c2;
        p[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
      }
    };
    update(params.layers[l].weights, grad.layers[l].weights, state.m.layers[l].weights,
           state.v.layers[l].weights);
    update(params.layers[l].bias, grad.layers[l].bias, state.m.layers[l].bias,
           state.v.layers[l].bias);
  }
}

double reinforce_loss(std::span<const double> scores, const RewardRecord& rewards) {
  check_aligned(scores.size(), rewards);
  const auto adv = advantages(rewards);
  const auto log_a = log_softmax(scores);
  double s = 0.0;
  for (std::size_t i = 0; i < adv.size(); ++i) s += adv[i] * log_a[i];
  return -s / static_cast<double>(adv.size());
}

std::vector<double> reinforce_score_gradient(std::span<const double> scores,
                                             const RewardRecord& rewards) {
  check_aligned(scores.size(), rewards);
  const auto adv = advantages(rewards);
  const auto probs = softmax(scores);
  double adv_sum = 0.0;
  for (double a : adv) adv_sum += a;
  const double inv_p = 1.0 / static_cast<double>(adv.size());
  std::vector<double> g(adv.size());
  for (std::size_t j = 0; j < adv.size(); ++j) g[j] = -inv_p * (adv[j] - probs[j] * adv_sum);
  return g;
}

PolicyGradient reinforce_gradient(const AgentParams& params, const CandidatePool& pool,
                                  const FeatureVector& query, const RewardRecord& rewards) {
  check_aligned(pool.size(), rewards);
  const std::size_t p = pool.size();
  std::vector<ForwardCache> caches(p);
  std::vector<double> scores(p);
  for (std::size_t i = 0; i < p; ++i) {
    scores[i] = score_pair(params, pool.features[i].values, query.values, &caches[i]);
  }
  PolicyGradient out;
  out.grad = zeros_like(params);
  out.loss = reinforce_loss(scores, rewards);
  if (!std::isfinite(out.loss)) {
    fail(ErrorCode::kNonFinite, "non-finite surrogate loss for query '" + query.id + "'");
  }
  out.probs = softmax(scores);
  const auto ds = reinforce_score_gradient(scores, rewards);
  for (std::size_t i = 0; i < p; ++i) {
    if (ds[i] != 0.0) backward(params, caches[i], ds[i], out.grad);
  }
  return out;
}

double reinforce_loss(const AgentParams& params, const CandidatePool& pool,
                      const FeatureVector& query, const RewardRecord& rewards) {
  std::vector<double> scores;
  scores.reserve(pool.size());
  for (const auto& cand : pool.features) {
    scores.push_back(score_pair(params, cand.values, query.values));
  }
  return reinforce_loss(scores, rewards);
}

double mean_top1_reward(const AgentParams& params, const CandidatePool& pool,
                        const FeatureSet& queries, std::span<const RewardRecord> rewards) {
  if (queries.empty()) return 0.0;
  const auto ids = pool.ids();
  double total = 0.0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    std::vector<double> scores;
    scores.reserve(pool.size());
    for (const auto& cand : pool.features) {
      scores.push_back(score_pair(params, cand.values, queries[q].values));
    }
    total += rewards[q].ious[top1_index(scores, ids)];
  }
  return total / static_cast<double>(queries.size());
}

bool operator==(const EpochStats& a, const EpochStats& b) {
  return a.epoch == b.epoch && a.lr == b.lr && a.mean_loss == b.mean_loss &&
         a.mean_top1_reward == b.mean_top1_reward;
}

bool operator==(const TrainReport& a, const TrainReport& b) {
  return a.initial_mean_top1_reward == b.initial_mean_top1_reward && a.epochs == b.epochs &&
         a.params_checksum == b.params_checksum;
}

TrainResult train_agent(const FeatureSet& queries, const CandidatePool& pool, const Oracle& oracle,
                        const TrainConfig& cfg, const AgentConfig& agent_cfg,
                        const EpochCallback& on_epoch) {
  validate(cfg);
  if (pool.empty()) fail(ErrorCode::kEmptyInput, "training needs a nonempty candidate pool");
  if (agent_cfg.feature_dim != pool.features.dim()) {
    fail(ErrorCode::kDimensionMismatch, "agent feature_dim does not match the pool");
  }
  if (!queries.empty() && queries.dim() != pool.features.dim()) {
    fail(ErrorCode::kDimensionMismatch, "training queries and pool differ in dimension");
  }

  TrainResult result;
  result.params = init_agent(agent_cfg);
  auto& params = result.params;
  auto& report = result.report;

  if (queries.empty()) {
    for (std::size_t e = 0; e < cfg.epochs; ++e)
      report.epochs.push_back({e, lr_schedule(e, cfg), 0.0, 0.0});
    report.params_checksum = params.checksum();
    return result;
  }
  if (pool.size() < 2)
    fail(ErrorCode::kInvalidArgument, "training needs a pool of >= 2 candidates");

  const auto pool_ids = pool.ids();
  std::vector<RewardRecord> rewards;
  rewards.reserve(queries.size());
  for (const auto& q : queries) rewards.push_back(score_batch(oracle, q.id, pool_ids));

  report.initial_mean_top1_reward = mean_top1_reward(params, pool, queries, rewards);

  AdamState adam = AdamState::for_params(params);
  Rng shuffle_rng(cfg.seed);
  std::vector<std::size_t> order(queries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_schedule(epoch, cfg);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      AgentParams batch_grad = zeros_like(params);
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t q = order[k];
        auto pg = reinforce_gradient(params, pool, queries[q], rewards[q]);
        loss_sum += pg.loss;
        for_each_pair(batch_grad, pg.grad, [](double& acc, double g) { acc += g; });
      }
      scale(batch_grad, 1.0 / static_cast<double>(stop - start));
      if (cfg.clip_norm > 0.0) {
        const double norm = std::sqrt(squared_norm(batch_grad));
        if (norm > cfg.clip_norm) scale(batch_grad, cfg.clip_norm / norm);
      }
      adam_step(params, batch_grad, adam, lr, cfg);
    }
    EpochStats stats{epoch, lr, loss_sum / static_cast<double>(queries.size()),
                     mean_top1_reward(params, pool, queries, rewards)};
    if (!std::isfinite(stats.mean_loss)) fail(ErrorCode::kNonFinite, "training loss diverged");
    report.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats, params);
  }
  report.params_checksum = params.checksum();
  return result;
}

void write_report_csv(std::ostream& out, const TrainReport& report) {
  out << "epoch,lr,mean_loss,mean_top1_reward\n";
  for (const auto& e : report.epochs) {
    out << e.epoch << ',' << detail::format_double(e.lr) << ','
        << detail::format_double(e.mean_loss) << ',' << detail::format_double(e.mean_top1_reward)
        << '\n';
  }
}

}  // namespace scs
