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

#include <random>
#include <sstream>

#include "scs/error.hpp"
#include "scs/pool.hpp"
#include "support/reference.hpp"

namespace scs {
namespace {

KMeansModel fixed_model(std::size_t dim, std::vector<std::vector<double>> centroids,
                        std::map<std::string, std::size_t> assignments) {
  KMeansModel m;
  m.dim = dim;
  m.centroids = std::move(centroids);
  m.assignments = std::move(assignments);
  return m;
}

TEST(BuildPoolTest, TwoMemberCluster) {
  const FeatureSet set(1, {{"far", {3}}, {"near", {1}}});
  const auto model = fixed_model(1, {{0}}, {{"far", 0}, {"near", 0}});
  const auto pool = build_pool(model, set);
  ASSERT_EQ(pool.size(), 2u);
  EXPECT_EQ(pool.entries[0].id, "near");
  EXPECT_EQ(pool.entries[0].rank, PoolRank::kNearest);
  EXPECT_DOUBLE_EQ(pool.entries[0].distance, 1.0);
  EXPECT_EQ(pool.entries[1].id, "far");
  EXPECT_EQ(pool.entries[1].rank, PoolRank::kFarthest);
  EXPECT_EQ(pool.features.ids(), (std::vector<std::string>{"near", "far"}));
}

TEST(BuildPoolTest, SingletonAndEmptyClusters) {
  const FeatureSet set(1, {{"a", {0}}, {"b", {1}}, {"c", {10}}});
  const auto model = fixed_model(1, {{0.5}, {10}, {50}}, {{"a", 0}, {"b", 0}, {"c", 1}});
  const auto pool = build_pool(model, set);
  ASSERT_EQ(pool.size(), 3u);
  EXPECT_EQ(pool.entries[2].id, "c");
  EXPECT_EQ(pool.entries[2].rank, PoolRank::kNearest);
}

TEST(BuildPoolTest, DistanceTiesBreakById) {
  const FeatureSet set(1, {{"z", {1}}, {"y", {-1}}, {"x", {1}}});
  const auto model = fixed_model(1, {{0}}, {{"x", 0}, {"y", 0}, {"z", 0}});
  const auto pool = build_pool(model, set);
  EXPECT_EQ(pool.entries[0].id, "x");
  EXPECT_EQ(pool.entries[1].id, "z");
}

TEST(BuildPoolTest, TenClustersGiveTwentyEntries) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto set = testing::random_set(200, 4, rng);
    const auto model = kmeans_fit(set, {10, 300, rng(), 0.0});
    std::size_t singletons = 0;
    for (auto n : model.cluster_sizes()) singletons += n == 1;
    EXPECT_EQ(build_pool(model, set).size(), 20 - singletons);
  }
}

TEST(BuildPoolTest, MatchesFullSortOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto set = testing::random_set(2 + rng() % 60, 1 + rng() % 6, rng);
    const auto model =
        kmeans_fit(set, {1 + rng() % std::min<std::size_t>(10, set.size()), 300, rng(), 0.0});
    const auto pool = build_pool(model, set);
    const auto ref = testing::ref_pool(model, set);
    ASSERT_EQ(pool.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_EQ(pool.entries[i].id, ref[i].id);
      EXPECT_EQ(pool.entries[i].cluster, ref[i].cluster);
      EXPECT_EQ(pool.entries[i].rank == PoolRank::kNearest, ref[i].nearest);
    }
  }
}

TEST(BuildPoolTest, Errors) {
  const FeatureSet set(1, {{"a", {0}}});
  EXPECT_THROW(build_pool(fixed_model(1, {{0}}, {{"a", 0}, {"ghost", 0}}), set), Error);
  EXPECT_THROW(build_pool(fixed_model(1, {{0}}, {}), set), Error);
  EXPECT_THROW(build_pool(fixed_model(2, {{0, 0}}, {{"a", 0}}), set), Error);
}

TEST(PoolDistancesTest, Examples) {
  const FeatureSet set(2, {{"a", {1, 0}}, {"b", {0, 2}}});
  const auto pool = testing::pool_of(set);
  const auto d = pool_distances(pool, {"q", {3, 0}});
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d[0].second, 1.0);
  EXPECT_NEAR(d[1].second, 0.0, 1e-15);
  EXPECT_EQ(
      pool_distances(testing::pool_of(set.subset(std::vector<std::string>{"b"})), {"q", {1, 1}})
          .size(),
      1u);
  EXPECT_THROW(pool_distances(pool, {"q", {1, 0, 0}}), Error);
}

TEST(PoolDistancesTest, MatchesPairwiseCosine) {
  std::mt19937_64 rng(9);
  const auto set = testing::random_set(30, 7, rng);
  const auto pool = testing::pool_of(set);
  const auto queries = testing::random_set(10, 7, rng, "q");
  for (const auto& q : queries) {
    const auto d = pool_distances(pool, q);
    for (std::size_t i = 0; i < set.size(); ++i) {
      EXPECT_EQ(d[i].first, set[i].id);
      EXPECT_EQ(d[i].second, cosine_similarity(set[i], q));
    }
  }
}

TEST(ManifestTest, RoundTrip) {
  std::mt19937_64 rng(11);
  const auto set = testing::random_set(50, 3, rng);
  const auto pool = build_pool(kmeans_fit(set, {4, 300, 1, 0.0}), set);
  std::stringstream buf;
  write_manifest(buf, pool);
  const auto back = read_manifest(buf);
  ASSERT_EQ(back.size(), pool.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].id, pool.entries[i].id);
    EXPECT_EQ(back[i].cluster, pool.entries[i].cluster);
    EXPECT_EQ(back[i].rank, pool.entries[i].rank);
    EXPECT_EQ(back[i].distance, pool.entries[i].distance);
  }
  const auto rebuilt = pool_from_entries(back, set);
  EXPECT_EQ(rebuilt.features.ids(), pool.features.ids());
}

TEST(ManifestTest, MalformedInput) {
  std::istringstream bad_header("id,cluster\n");
  EXPECT_THROW(read_manifest(bad_header), Error);
  std::istringstream bad_rank("id,cluster,rank,distance\na,0,middle,1\n");
  EXPECT_THROW(read_manifest(bad_rank), Error);
  EXPECT_THROW(load_manifest("/nonexistent/manifest.csv"), Error);
}

}  // namespace
}  // namespace scs
