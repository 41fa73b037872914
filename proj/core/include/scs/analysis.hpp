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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "scs/features.hpp"
#include "scs/oracle.hpp"

namespace scs {

/// Per-query selections and rewards of one context-selection strategy.
struct StrategyResult {
  std::string name;
  std::vector<std::string> query_ids;
  std::vector<std::vector<std::string>> selections;
  std::vector<double> rewards;
  double mean_reward = 0.0;
};

struct VarianceReport {
  std::vector<std::uint64_t> seeds;
  std::vector<StrategyResult> runs;  // one per seed
  double best = 0.0;
  double worst = 0.0;
  double mean = 0.0;
};

struct AnalysisOptions {
  // Skip a candidate whose id equals the query id, so a sample never serves
  // as its own context when queries and candidates come from one set.
  bool exclude_self = true;
};

enum class SimilarityMode { kNearest, kFarthest };

/// Candidate indices ordered by cosine similarity to `query`: descending for
/// kNearest, ascending for kFarthest; equal similarities order by id.
std::vector<std::size_t> rank_by_similarity(const FeatureVector& query,
                                            const FeatureSet& candidates, SimilarityMode mode,
                                            const AnalysisOptions& opts = {});

/// Uniform n-shot sampling without replacement, repeated for every seed.
/// A query's reward is the mean oracle score of its sampled contexts.
VarianceReport random_baseline(const FeatureSet& queries, const FeatureSet& candidates,
                               const Oracle& oracle, std::size_t n_shot,
                               std::span<const std::uint64_t> seeds,
                               const AnalysisOptions& opts = {});

StrategyResult similarity_baseline(const FeatureSet& queries, const FeatureSet& candidates,
                                   const Oracle& oracle, SimilarityMode mode, std::size_t n_shot,
                                   const AnalysisOptions& opts = {});

struct DiversityResult {
  StrategyResult nn;  // two nearest
  StrategyResult ff;  // two farthest
  StrategyResult nf;  // nearest plus farthest
};

DiversityResult diversity_comparison(const FeatureSet& queries, const FeatureSet& candidates,
                                     const Oracle& oracle, const AnalysisOptions& opts = {});

struct WinnerProportions {
  double nearest_wins = 0.0;
  double farthest_wins = 0.0;
  double ties = 0.0;
};

/// Per-query comparison of rewards; equal rewards count as ties.
WinnerProportions winner_proportions(const StrategyResult& nearest, const StrategyResult& farthest);

// CSV: query_id,strategy,selected,reward   (selected ids joined with ';')
void write_strategy_csv(std::ostream& out, std::span<const StrategyResult> results);
// CSV: seed,mean_reward   followed by a plain-text summary block
void write_variance_csv(std::ostream& out, const VarianceReport& report);
// CSV: p_nearest_wins,p_farthest_wins,p_ties
void write_winners_csv(std::ostream& out, const WinnerProportions& p);
void write_summary(std::ostream& out, std::span<const StrategyResult> results);

}  // namespace scs
