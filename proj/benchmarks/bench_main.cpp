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

#include <benchmark/benchmark.h>

#include <random>

#include "scs/scs.hpp"

namespace {

scs::FeatureSet gaussian_set(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<scs::FeatureVector> items(n);
  for (std::size_t i = 0; i < n; ++i) {
    items[i].id = "s" + std::to_string(i);
    items[i].values.resize(d);
    for (auto& v : items[i].values) v = normal(rng);
  }
  return scs::FeatureSet(d, std::move(items));
}

void BM_KMeansFit(benchmark::State& state) {
  const auto set = gaussian_set(static_cast<std::size_t>(state.range(0)), 64, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scs::kmeans_fit(set, {10, 300, 2, 0.0}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KMeansFit)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

// Pool of 2M = 20 candidates scored against one query at the default width.
void BM_ScoreCandidates(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto set = gaussian_set(200, dim, 3);
  const auto pool = scs::build_pool(scs::kmeans_fit(set, {10, 300, 4, 0.0}), set);
  scs::AgentConfig cfg;
  cfg.feature_dim = dim;
  const auto params = scs::init_agent(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scs::score_candidates(params, pool, set[0]));
  }
}
BENCHMARK(BM_ScoreCandidates)->Arg(32)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_ReinforceGradient(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto set = gaussian_set(200, dim, 5);
  const auto pool = scs::build_pool(scs::kmeans_fit(set, {10, 300, 6, 0.0}), set);
  scs::AgentConfig cfg;
  cfg.feature_dim = dim;
  const auto params = scs::init_agent(cfg);
  scs::RewardRecord rewards;
  rewards.query_id = set[0].id;
  for (std::size_t i = 0; i < pool.size(); ++i) rewards.ious.push_back((i % 5) / 4.0);
  rewards.avg = scs::reward_mean(rewards.ious);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scs::reinforce_gradient(params, pool, set[0], rewards));
  }
}
BENCHMARK(BM_ReinforceGradient)->Arg(32)->Arg(1024)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
