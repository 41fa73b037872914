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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "scs/analysis.hpp"
#include "scs/error.hpp"
#include "support/reference.hpp"

namespace scs {
namespace {

class ConstantOracle : public Oracle {
 public:
  OracleCapabilities capabilities() const override { return {true, false}; }
  std::string identity() const override { return "const"; }
  double score(const std::string&, const std::string&) const override { return 0.5; }
};

SimulatedOracle cosine_oracle(const FeatureSet& a, const FeatureSet& b) {
  SimulatedOracleConfig cfg;
  cfg.mode = SimulatedMode::kCosineSigmoid;
  cfg.alpha = 4.0;
  const std::vector<FeatureSet> sets{a, b};
  return SimulatedOracle(sets, cfg);
}

// Full sort of every eligible candidate by cosine, id as tie-break.
std::vector<std::string> sorted_ids(const FeatureVector& q, const FeatureSet& cands, bool nearest) {
  std::vector<std::pair<double, std::string>> rows;
  for (const auto& c : cands) {
    if (c.id == q.id) continue;
    rows.emplace_back(nearest ? -cosine_similarity(q, c) : cosine_similarity(q, c), c.id);
  }
  std::sort(rows.begin(), rows.end());
  std::vector<std::string> out;
  for (auto& r : rows) out.push_back(r.second);
  return out;
}

StrategyResult with_rewards(std::vector<double> rewards) {
  StrategyResult r;
  for (std::size_t i = 0; i < rewards.size(); ++i) r.query_ids.push_back("q" + std::to_string(i));
  r.rewards = std::move(rewards);
  return r;
}

TEST(RandomBaselineTest, SingleCandidateHasNoVariance) {
  const FeatureSet cands(1, {{"c", {1}}});
  const FeatureSet queries(1, {{"q1", {1}}, {"q2", {-1}}});
  const MatrixOracle m({"q1", "q2"}, {"c"}, {0.3, 0.9});
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  const auto rep = random_baseline(queries, cands, m, 1, seeds);
  EXPECT_EQ(rep.runs.size(), 5u);
  EXPECT_EQ(rep.best, rep.worst);
  EXPECT_EQ(rep.mean, rep.best);
  EXPECT_DOUBLE_EQ(rep.best, 0.6);
}

TEST(RandomBaselineTest, RepeatedSeedsAgreeAndConstantOracle) {
  std::mt19937_64 rng(1);
  const auto set = testing::random_set(30, 4, rng);
  const std::vector<std::uint64_t> seeds{9, 9, 4};
  const auto rep = random_baseline(set, set, ConstantOracle{}, 3, seeds);
  EXPECT_EQ(rep.runs[0].selections, rep.runs[1].selections);
  EXPECT_NE(rep.runs[0].selections, rep.runs[2].selections);
  EXPECT_EQ(rep.best, 0.5);
  EXPECT_EQ(rep.worst, 0.5);
  for (const auto& run : rep.runs) {
    for (std::size_t i = 0; i < run.selections.size(); ++i) {
      auto sel = run.selections[i];
      std::sort(sel.begin(), sel.end());
      EXPECT_EQ(std::unique(sel.begin(), sel.end()), sel.end());
      EXPECT_EQ(std::count(sel.begin(), sel.end(), run.query_ids[i]), 0);
    }
  }
}

TEST(RandomBaselineTest, Errors) {
  const FeatureSet set(1, {{"a", {1}}, {"b", {2}}});
  const std::vector<std::uint64_t> seeds{1};
  EXPECT_THROW(random_baseline(set, set, ConstantOracle{}, 2, seeds), Error);  // self excluded
  EXPECT_NO_THROW(random_baseline(set, set, ConstantOracle{}, 2, seeds, {false}));
  EXPECT_THROW(random_baseline(set, set, ConstantOracle{}, 0, seeds), Error);
  EXPECT_THROW(random_baseline(set, set, ConstantOracle{}, 1, std::span<const std::uint64_t>{}),
               Error);
}

TEST(SimilarityBaselineTest, Examples) {
  const FeatureSet cands(2, {{"x", {1, 0}}, {"y", {0, 1}}, {"z", {-1, 0}}});
  const FeatureSet queries(2, {{"q", {2, 0}}});
  const auto o = cosine_oracle(cands, queries);
  EXPECT_EQ(similarity_baseline(queries, cands, o, SimilarityMode::kNearest, 1).selections[0][0],
            "x");
  EXPECT_EQ(similarity_baseline(queries, cands, o, SimilarityMode::kFarthest, 1).selections[0][0],
            "z");

  const FeatureSet one(2, {{"x", {1, 0}}});
  EXPECT_EQ(similarity_baseline(queries, one, o, SimilarityMode::kNearest, 1).selections,
            similarity_baseline(queries, one, o, SimilarityMode::kFarthest, 1).selections);
  EXPECT_THROW(similarity_baseline(queries, one, o, SimilarityMode::kNearest, 2), Error);
}

TEST(SimilarityBaselineTest, NearestBeatsFarthestUnderMonotoneOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto cands = testing::random_set(25, 5, rng);
    const auto queries = testing::random_set(15, 5, rng, "q");
    const auto o = cosine_oracle(cands, queries);
    const std::size_t n = 1 + rng() % 3;
    const auto near = similarity_baseline(queries, cands, o, SimilarityMode::kNearest, n);
    const auto far = similarity_baseline(queries, cands, o, SimilarityMode::kFarthest, n);
    for (std::size_t i = 0; i < queries.size(); ++i) EXPECT_GE(near.rewards[i], far.rewards[i]);
    const auto p = winner_proportions(near, far);
    EXPECT_EQ(p.farthest_wins, 0.0);
    EXPECT_EQ(p.nearest_wins + p.ties, 1.0);
  }
}

TEST(DiversityTest, TwoCandidatesCoincide) {
  const FeatureSet cands(2, {{"a", {1, 0}}, {"b", {0, 1}}});
  const FeatureSet queries(2, {{"q", {1, 1}}});
  const auto d = diversity_comparison(queries, cands, ConstantOracle{});
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  EXPECT_EQ(sorted(d.nn.selections[0]), sorted(d.ff.selections[0]));
  EXPECT_EQ(sorted(d.nn.selections[0]), sorted(d.nf.selections[0]));
}

TEST(DiversityTest, IdenticalCandidatesTie) {
  const FeatureSet cands(2, {{"c", {1, 1}}, {"a", {1, 1}}, {"b", {1, 1}}});
  const FeatureSet queries(2, {{"q", {3, -1}}});
  const auto d = diversity_comparison(queries, cands, ConstantOracle{});
  EXPECT_EQ(d.nn.selections[0], (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.ff.selections[0], (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.nf.selections[0], (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.nn.mean_reward, d.ff.mean_reward);
  EXPECT_EQ(d.nn.mean_reward, d.nf.mean_reward);
}

TEST(DiversityTest, MatchesFullSort) {
  std::mt19937_64 rng(3);
  const auto set = testing::random_set(40, 6, rng);
  const auto d = diversity_comparison(set, set, ConstantOracle{});
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto near = sorted_ids(set[i], set, true);
    const auto far = sorted_ids(set[i], set, false);
    EXPECT_EQ(d.nn.selections[i], (std::vector<std::string>{near[0], near[1]}));
    EXPECT_EQ(d.ff.selections[i], (std::vector<std::string>{far[0], far[1]}));
    EXPECT_EQ(d.nf.selections[i], (std::vector<std::string>{near[0], far[0]}));
  }
}

TEST(DiversityTest, NeedsTwoCandidates) {
  const FeatureSet set(1, {{"a", {1}}, {"b", {2}}});
  EXPECT_THROW(diversity_comparison(set, set, ConstantOracle{}), Error);
}

TEST(WinnerProportionsTest, Examples) {
  auto p = winner_proportions(with_rewards({0.9, 0.8}), with_rewards({0.1, 0.2}));
  EXPECT_EQ(p.nearest_wins, 1.0);
  EXPECT_EQ(p.farthest_wins, 0.0);
  EXPECT_EQ(p.ties, 0.0);
  p = winner_proportions(with_rewards({0.5, 0.5}), with_rewards({0.5, 0.5}));
  EXPECT_EQ(p.ties, 1.0);
  EXPECT_THROW(winner_proportions(with_rewards({0.5}), with_rewards({0.5, 0.5})), Error);
}

TEST(WinnerProportionsTest, MatchesRecount) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> level(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = level(rng), b[i] = level(rng);
    int nw = 0, fw = 0, t = 0;
    for (std::size_t i = 0; i < n; ++i) (a[i] > b[i] ? nw : a[i] < b[i] ? fw : t)++;
    const auto p = winner_proportions(with_rewards(a), with_rewards(b));
    EXPECT_EQ(p.nearest_wins, static_cast<double>(nw) / n);
    EXPECT_EQ(p.farthest_wins, static_cast<double>(fw) / n);
    EXPECT_EQ(p.ties, static_cast<double>(t) / n);
  }
}

TEST(WinnerProportionsTest, OverlappingClassesLetFarthestWin) {
  SyntheticWorldConfig sc;
  sc.noise_scale = 2.0;
  sc.dim = 8;
  sc.seed = 5;
  const auto world = generate_synthetic(sc);
  const SimulatedOracle o(world.labels, SimulatedOracleConfig{});
  const auto near =
      similarity_baseline(world.features, world.features, o, SimilarityMode::kNearest, 1);
  const auto far =
      similarity_baseline(world.features, world.features, o, SimilarityMode::kFarthest, 1);
  const auto p = winner_proportions(near, far);
  EXPECT_GT(p.farthest_wins, 0.0);
  EXPECT_NEAR(p.nearest_wins + p.farthest_wins + p.ties, 1.0, 1e-15);
}

TEST(ReportTest, CsvShapes) {
  auto r = with_rewards({0.25, 0.75});
  r.name = "nearest";
  r.selections = {{"a", "b"}, {"c"}};
  std::ostringstream out;
  write_strategy_csv(out, std::span<const StrategyResult>(&r, 1));
  EXPECT_EQ(out.str(),
            "query_id,strategy,selected,reward\nq0,nearest,a;b,0.25\nq1,nearest,c,0.75\n");
  std::ostringstream w;
  write_winners_csv(w, {0.5, 0.25, 0.25});
  EXPECT_EQ(w.str(), "p_nearest_wins,p_farthest_wins,p_ties\n0.5,0.25,0.25\n");
}

}  // namespace
}  // namespace scs
