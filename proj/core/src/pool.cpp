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

#include "scs/pool.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "io_util.hpp"
#include "scs/error.hpp"

namespace scs {

std::string_view to_string(PoolRank rank) {
  return rank == PoolRank::kNearest ? "nearest" : "farthest";
}

std::vector<std::string> CandidatePool::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.id);
  return out;
}

CandidatePool build_pool(const KMeansModel& model, const FeatureSet& set) {
  if (set.dim() != model.dim) fail(ErrorCode::kDimensionMismatch, "model/set dimension mismatch");
  for (const auto& [id, c] : model.assignments) {
    if (!set.contains(id)) {
      fail(ErrorCode::kUnknownId, "model assigns '" + id + "' which is not in the feature set");
    }
  }
  struct Member {
    double distance;
    const std::string* id;
  };
  std::vector<std::vector<Member>> members(model.num_clusters());
  for (const auto& item : set) {
    auto c = model.cluster_of(item.id);
    if (!c) fail(ErrorCode::kUnknownId, "sample '" + item.id + "' has no cluster assignment");
    members[*c].push_back(
        {std::sqrt(squared_distance(item.values, model.centroids[*c])), &item.id});
  }

  CandidatePool pool;
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto& list = members[c];
    if (list.empty()) continue;
    std::sort(list.begin(), list.end(), [](const Member& a, const Member& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      return *a.id < *b.id;
    });
    pool.entries.push_back({*list.front().id, c, PoolRank::kNearest, list.front().distance});
    if (list.size() >= 2) {
      pool.entries.push_back({*list.back().id, c, PoolRank::kFarthest, list.back().distance});
    }
  }
  const auto ids = pool.ids();
  pool.features = set.subset(ids);
  return pool;
}

std::vector<std::pair<std::string, double>> pool_distances(const CandidatePool& pool,
                                                           const FeatureVector& query) {
  if (!pool.empty() && query.values.size() != pool.features.dim()) {
    fail(ErrorCode::kDimensionMismatch, "query dim does not match pool dim");
  }
  std::vector<std::pair<std::string, double>> out;
  out.reserve(pool.size());
  for (const auto& item : pool.features) {
    out.emplace_back(item.id, cosine_similarity(item, query));
  }
  return out;
}

CandidatePool pool_from_entries(std::vector<CandidateEntry> entries, const FeatureSet& set) {
  CandidatePool pool;
  pool.entries = std::move(entries);
  const auto ids = pool.ids();
  pool.features = set.subset(ids);
  return pool;
}

void write_manifest(std::ostream& out, const CandidatePool& pool) {
  out << "id,cluster,rank,distance\n";
  for (const auto& e : pool.entries) {
    out << e.id << ',' << e.cluster << ',' << to_string(e.rank) << ','
        << detail::format_double(e.distance) << '\n';
  }
}

std::vector<CandidateEntry> read_manifest(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "id,cluster,rank,distance") {
    fail(ErrorCode::kMalformedHeader, "manifest must start with 'id,cluster,rank,distance'");
  }
  std::vector<CandidateEntry> entries;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto f = detail::split(detail::trim(line), ',');
    CandidateEntry e;
    bool ok = f.size() == 4 && detail::parse_int(f[1], e.cluster) &&
              detail::parse_double(f[3], e.distance);
    if (ok && f[2] == "nearest") {
      e.rank = PoolRank::kNearest;
    } else if (ok && f[2] == "farthest") {
      e.rank = PoolRank::kFarthest;
    } else {
      ok = false;
    }
    if (!ok) fail(ErrorCode::kMalformedHeader, "bad manifest row '" + line + "'");
    e.id = std::string(f[0]);
    entries.push_back(std::move(e));
  }
  return entries;
}

void save_manifest(const CandidatePool& pool, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  write_manifest(out, pool);
}

std::vector<CandidateEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open manifest '" + path.string() + "'");
  return read_manifest(in);
}

}  // namespace scs
