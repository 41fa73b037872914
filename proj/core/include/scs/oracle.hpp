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
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "scs/features.hpp"

namespace scs {

struct OracleCapabilities {
  bool deterministic = true;
  bool batched = false;
};

/// Reward provider standing in for an in-context segmentation model: maps a
/// (query, context candidate) pair to the IoU the model would reach on the
/// query when prompted with that candidate. Implementations must be safe to
/// call concurrently.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual OracleCapabilities capabilities() const = 0;
  /// Stable description used to key persisted caches.
  virtual std::string identity() const = 0;
  virtual double score(const std::string& query_id, const std::string& candidate_id) const = 0;
  /// Scores aligned to `candidate_ids`. The default loops over score().
  virtual std::vector<double> score_many(const std::string& query_id,
                                         std::span<const std::string> candidate_ids) const;
};

/// Per-candidate rewards for one query, aligned with pool order.
struct RewardRecord {
  std::string query_id;
  std::vector<double> ious;
  double avg = 0.0;
};

/// Mean computed as u0 + sum(u - u0) / n, which is exactly u0 when every
/// value equals u0.
double reward_mean(std::span<const double> values);

/// Validated single score. Errors carry both ids.
double score_pair(const Oracle& oracle, const std::string& query_id,
                  const std::string& candidate_id);

/// Validated scores for one query against many candidates.
RewardRecord score_batch(const Oracle& oracle, const std::string& query_id,
                         std::span<const std::string> candidate_ids);

/// Dense query x candidate IoU table.
///
/// File layout: CSV whose first row is a corner cell followed by candidate
/// ids, and whose remaining rows are a query id followed by one value in
/// [0, 1] per candidate.
class MatrixOracle final : public Oracle {
 public:
  MatrixOracle(std::vector<std::string> query_ids, std::vector<std::string> candidate_ids,
               std::vector<double> values);

  static MatrixOracle read(std::istream& in);
  static MatrixOracle load(const std::filesystem::path& path);
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  OracleCapabilities capabilities() const override { return {true, false}; }
  std::string identity() const override;
  double score(const std::string& query_id, const std::string& candidate_id) const override;

  const std::vector<std::string>& query_ids() const noexcept { return query_ids_; }
  const std::vector<std::string>& candidate_ids() const noexcept { return candidate_ids_; }

 private:
  std::vector<std::string> query_ids_;
  std::vector<std::string> candidate_ids_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> query_index_;
  std::unordered_map<std::string, std::size_t> candidate_index_;
};

enum class SimulatedMode { kClassMatch, kCosineSigmoid };

struct SimulatedOracleConfig {
  SimulatedMode mode = SimulatedMode::kClassMatch;
  double match_score = 0.8;
  double mismatch_score = 0.2;
  double alpha = 1.0;
  double beta = 0.0;
  double noise_scale = 0.0;
  std::uint64_t seed = 0;
};

/// Desk-scale reward model.
///
/// class_match: match_score when the two ids share a latent class label,
/// mismatch_score otherwise. cosine_sigmoid: 1 / (1 + exp(-(alpha * cos + beta)))
/// over the pair's feature vectors. Noise, when enabled, is a pure function
/// of (seed, query id, candidate id), and the result is clamped to [0, 1].
class SimulatedOracle final : public Oracle {
 public:
  SimulatedOracle(std::map<std::string, int> labels, SimulatedOracleConfig cfg);
  SimulatedOracle(std::span<const FeatureSet> feature_sets, SimulatedOracleConfig cfg);

  OracleCapabilities capabilities() const override { return {true, false}; }
  std::string identity() const override;
  double score(const std::string& query_id, const std::string& candidate_id) const override;

 private:
  SimulatedOracleConfig cfg_;
  std::map<std::string, int> labels_;
  std::unordered_map<std::string, std::vector<double>> features_;
};

/// Memoizing decorator. Entries can be persisted to and restored from a CSV
/// sidecar (`oracle,query_id,candidate_id,iou`); rows recorded for a
/// different oracle identity are ignored on load.
class CachedOracle final : public Oracle {
 public:
  explicit CachedOracle(std::shared_ptr<const Oracle> inner);

  OracleCapabilities capabilities() const override { return inner_->capabilities(); }
  std::string identity() const override { return inner_->identity(); }
  double score(const std::string& query_id, const std::string& candidate_id) const override;
  std::vector<double> score_many(const std::string& query_id,
                                 std::span<const std::string> candidate_ids) const override;

  std::size_t cached_count() const;
  std::size_t miss_count() const;
  void load_sidecar(const std::filesystem::path& path);
  void save_sidecar(const std::filesystem::path& path) const;

 private:
  std::shared_ptr<const Oracle> inner_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::string, std::string>, double> cache_;
  mutable std::size_t misses_ = 0;
};

}  // namespace scs
