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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scs/clustering.hpp"
#include "scs/features.hpp"

namespace scs {

enum class PoolRank { kNearest, kFarthest };

std::string_view to_string(PoolRank rank);

struct CandidateEntry {
  std::string id;
  std::size_t cluster = 0;
  PoolRank rank = PoolRank::kNearest;
  // Euclidean (not squared) distance to the cluster centroid.
  double distance = 0.0;
};

/// The typical samples of every cluster: its member nearest to the centroid
/// and its member farthest from it. Entries are ordered by cluster, nearest
/// first. `features` holds the entries' vectors in the same order.
struct CandidatePool {
  std::vector<CandidateEntry> entries;
  FeatureSet features;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
  std::vector<std::string> ids() const;
};

/// Members of each cluster are ranked by distance to the centroid (ties by
/// id); the first and last are kept. Singleton clusters contribute one
/// nearest entry and empty clusters none.
CandidatePool build_pool(const KMeansModel& model, const FeatureSet& set);

/// Cosine similarity of `query` to every pool member, in pool order.
std::vector<std::pair<std::string, double>> pool_distances(const CandidatePool& pool,
                                                           const FeatureVector& query);

/// Rebuilds a pool from manifest rows and the feature set they index.
CandidatePool pool_from_entries(std::vector<CandidateEntry> entries, const FeatureSet& set);

// Annotation manifest: CSV header `id,cluster,rank,distance`.
void write_manifest(std::ostream& out, const CandidatePool& pool);
std::vector<CandidateEntry> read_manifest(std::istream& in);
void save_manifest(const CandidatePool& pool, const std::filesystem::path& path);
std::vector<CandidateEntry> load_manifest(const std::filesystem::path& path);

}  // namespace scs
