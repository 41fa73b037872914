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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scs/features.hpp"

namespace scs {

enum class KMeansInit { kRandom, kPlusPlus };

struct KMeansConfig {
  std::size_t num_clusters = 10;
  std::size_t max_iters = 300;
  std::uint64_t seed = 0;
  // Stop once an update improves the objective by less than this. 0 runs to
  // the assignment fixpoint (or max_iters).
  double tol = 0.0;
  KMeansInit init = KMeansInit::kRandom;
};

struct KMeansModel {
  std::size_t dim = 0;
  std::vector<std::vector<double>> centroids;
  std::map<std::string, std::size_t> assignments;
  // Sum of squared distances of every sample to its assigned centroid.
  double objective = 0.0;
  std::size_t iterations_run = 0;
  bool converged = false;
  // Objective after every assignment and every update half-step. Not
  // serialized.
  std::vector<double> objective_trace;

  std::size_t num_clusters() const noexcept { return centroids.size(); }
  std::optional<std::size_t> cluster_of(const std::string& id) const;
  std::vector<std::size_t> cluster_sizes() const;
};

/// Lloyd's algorithm over squared Euclidean distance. Samples are processed
/// in id order, so the partition does not depend on input order.
///
/// Empty clusters are reseeded at the sample farthest from its own centroid
/// (taken from clusters with at least two members) so exactly M clusters
/// survive whenever the data has M distinct points.
KMeansModel kmeans_fit(const FeatureSet& set, const KMeansConfig& cfg);

/// Index of the nearest centroid; ties go to the lowest index.
std::size_t assign(const KMeansModel& model, std::span<const double> v);
std::size_t assign(const KMeansModel& model, const FeatureVector& v);

/// Recomputes the k-means objective of `model` over `set`. Throws kUnknownId
/// if a sample has no assignment.
double objective(const KMeansModel& model, const FeatureSet& set);

void write_model(std::ostream& out, const KMeansModel& model);
KMeansModel read_model(std::istream& in);
void save_model(const KMeansModel& model, const std::filesystem::path& path);
KMeansModel load_model(const std::filesystem::path& path);

}  // namespace scs
