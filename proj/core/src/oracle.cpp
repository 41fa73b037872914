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

#include "scs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "io_util.hpp"
#include "scs/error.hpp"
#include "scs/rng.hpp"

namespace scs {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string pair_label(const std::string& q, const std::string& c) {
  return "(query '" + q + "', candidate '" + c + "')";
}

void check_score(double v, const std::string& q, const std::string& c) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    fail(ErrorCode::kOutOfRange,
         "oracle returned " + detail::format_double(v) + " outside [0,1] for " + pair_label(q, c));
  }
}

// Re-raise oracle failures with pair context; transport and range errors keep
// their codes so callers can tell them apart.
[[noreturn]] void rethrow_with_pair(const Error& e, const std::string& q, const std::string& c) {
  const auto code = e.code() == ErrorCode::kTransport || e.code() == ErrorCode::kOutOfRange
                        ? e.code()
                        : ErrorCode::kOracle;
  fail(code, std::string(e.what()) + " at " + pair_label(q, c));
}

}  // namespace

std::vector<double> Oracle::score_many(const std::string& query_id,
                                       std::span<const std::string> candidate_ids) const {
  std::vector<double> out;
  out.reserve(candidate_ids.size());
  for (const auto& c : candidate_ids) out.push_back(score(query_id, c));
  return out;
}

double reward_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double first = values.front();
  double acc = 0.0;
  for (double v : values) acc += v - first;
  return first + acc / static_cast<double>(values.size());
}

double score_pair(const Oracle& oracle, const std::string& query_id,
                  const std::string& candidate_id) {
  double v = 0.0;
  try {
    v = oracle.score(query_id, candidate_id);
  } catch (const Error& e) {
    rethrow_with_pair(e, query_id, candidate_id);
  }
  check_score(v, query_id, candidate_id);
  return v;
}

RewardRecord score_batch(const Oracle& oracle, const std::string& query_id,
                         std::span<const std::string> candidate_ids) {
  RewardRecord rec;
  rec.query_id = query_id;
  if (oracle.capabilities().batched) {
    try {
      rec.ious = oracle.score_many(query_id, candidate_ids);
    } catch (const Error& e) {
      const std::string first = candidate_ids.empty() ? std::string() : candidate_ids.front();
      rethrow_with_pair(e, query_id,
                        candidate_ids.size() > 1 ? first + "' .. '" + candidate_ids.back() : first);
    }
    if (rec.ious.size() != candidate_ids.size()) {
      fail(ErrorCode::kTransport, "oracle returned " + std::to_string(rec.ious.size()) +
                                      " scores for " + std::to_string(candidate_ids.size()) +
                                      " candidates of query '" + query_id + "'");
    }
    for (std::size_t i = 0; i < candidate_ids.size(); ++i) {
      check_score(rec.ious[i], query_id, candidate_ids[i]);
    }
  } else {
    rec.ious.reserve(candidate_ids.size());
    for (const auto& c : candidate_ids) rec.ious.push_back(score_pair(oracle, query_id, c));
  }
  rec.avg = reward_mean(rec.ious);
  return rec;
}

// --- MatrixOracle -----------------------------------------------------------

MatrixOracle::MatrixOracle(std::vector<std::string> query_ids,
                           std::vector<std::string> candidate_ids, std::vector<double> values)
    : query_ids_(std::move(query_ids)),
      candidate_ids_(std::move(candidate_ids)),
      values_(std::move(values)) {
  if (values_.size() != query_ids_.size() * candidate_ids_.size()) {
    fail(ErrorCode::kShapeMismatch, "IoU matrix size does not match its id lists");
  }
  for (std::size_t i = 0; i < query_ids_.size(); ++i) {
    if (!query_index_.emplace(query_ids_[i], i).second) {
      fail(ErrorCode::kDuplicateId, "duplicate query id '" + query_ids_[i] + "' in IoU matrix");
    }
  }
  for (std::size_t j = 0; j < candidate_ids_.size(); ++j) {
    if (!candidate_index_.emplace(candidate_ids_[j], j).second) {
      fail(ErrorCode::kDuplicateId,
           "duplicate candidate id '" + candidate_ids_[j] + "' in IoU matrix");
    }
  }
  for (std::size_t i = 0; i < query_ids_.size(); ++i) {
    for (std::size_t j = 0; j < candidate_ids_.size(); ++j) {
      const double v = values_[i * candidate_ids_.size() + j];
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        fail(ErrorCode::kOutOfRange,
             "IoU matrix value outside [0,1] at " + pair_label(query_ids_[i], candidate_ids_[j]));
      }
    }
  }
}

MatrixOracle MatrixOracle::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kMalformedHeader, "empty IoU matrix file");
  auto header = detail::split(detail::trim(line), ',');
  if (header.size() < 2) fail(ErrorCode::kMalformedHeader, "IoU matrix header has no candidates");
  std::vector<std::string> cands;
  for (std::size_t j = 1; j < header.size(); ++j) cands.emplace_back(detail::trim(header[j]));

  std::vector<std::string> queries;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto f = detail::split(detail::trim(line), ',');
    if (f.size() != header.size()) {
      fail(ErrorCode::kDimensionMismatch, "IoU matrix line " + std::to_string(line_no) + " has " +
                                              std::to_string(f.size()) + " fields, expected " +
                                              std::to_string(header.size()));
    }
    queries.emplace_back(detail::trim(f[0]));
    for (std::size_t j = 1; j < f.size(); ++j) {
      double v = 0.0;
      if (!detail::parse_double(f[j], v)) {
        fail(ErrorCode::kMalformedHeader, "IoU matrix line " + std::to_string(line_no) +
                                              ": cannot parse '" + std::string(f[j]) + "'");
      }
      values.push_back(v);
    }
  }
  return MatrixOracle(std::move(queries), std::move(cands), std::move(values));
}

MatrixOracle MatrixOracle::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open IoU matrix '" + path.string() + "'");
  return read(in);
}

void MatrixOracle::write(std::ostream& out) const {
  out << "query_id";
  for (const auto& c : candidate_ids_) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < query_ids_.size(); ++i) {
    out << query_ids_[i];
    for (std::size_t j = 0; j < candidate_ids_.size(); ++j) {
      out << ',' << detail::format_double(values_[i * candidate_ids_.size() + j]);
    }
    out << '\n';
  }
}

void MatrixOracle::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  write(out);
}

std::string MatrixOracle::identity() const {
  std::ostringstream buf;
  write(buf);
  return "matrix:" + hex64(hash_bytes(buf.str()));
}

double MatrixOracle::score(const std::string& query_id, const std::string& candidate_id) const {
  auto qi = query_index_.find(query_id);
  if (qi == query_index_.end()) fail(ErrorCode::kUnknownId, "query id not in IoU matrix");
  auto ci = candidate_index_.find(candidate_id);
  if (ci == candidate_index_.end()) fail(ErrorCode::kUnknownId, "candidate id not in IoU matrix");
  return values_[qi->second * candidate_ids_.size() + ci->second];
}

// --- SimulatedOracle --------------------------------------------------------

SimulatedOracle::SimulatedOracle(std::map<std::string, int> labels, SimulatedOracleConfig cfg)
    : cfg_(cfg), labels_(std::move(labels)) {
  if (cfg_.mode != SimulatedMode::kClassMatch) {
    fail(ErrorCode::kInvalidArgument, "label-backed simulated oracle requires class_match mode");
  }
  if (!(cfg_.noise_scale >= 0.0))
    fail(ErrorCode::kInvalidArgument, "oracle noise_scale must be >= 0");
}

SimulatedOracle::SimulatedOracle(std::span<const FeatureSet> feature_sets,
                                 SimulatedOracleConfig cfg)
    : cfg_(cfg) {
  if (cfg_.mode != SimulatedMode::kCosineSigmoid) {
    fail(ErrorCode::kInvalidArgument,
         "feature-backed simulated oracle requires cosine_sigmoid mode");
  }
  if (!(cfg_.noise_scale >= 0.0))
    fail(ErrorCode::kInvalidArgument, "oracle noise_scale must be >= 0");
  for (const auto& set : feature_sets) {
    for (const auto& item : set) features_.emplace(item.id, item.values);
  }
}

std::string SimulatedOracle::identity() const {
  std::ostringstream id;
  if (cfg_.mode == SimulatedMode::kClassMatch) {
    std::uint64_t h = 0;
    for (const auto& [k, v] : labels_)
      h = splitmix64(h ^ hash_bytes(k) ^ static_cast<std::uint64_t>(v));
    id << "class_match:" << detail::format_double(cfg_.match_score) << ':'
       << detail::format_double(cfg_.mismatch_score) << ":labels=" << hex64(h);
  } else {
    id << "cosine_sigmoid:" << detail::format_double(cfg_.alpha) << ':'
       << detail::format_double(cfg_.beta);
  }
  id << ":noise=" << detail::format_double(cfg_.noise_scale) << ":seed=" << cfg_.seed;
  return id.str();
}

double SimulatedOracle::score(const std::string& query_id, const std::string& candidate_id) const {
  double v = 0.0;
  if (cfg_.mode == SimulatedMode::kClassMatch) {
    auto q = labels_.find(query_id);
    if (q == labels_.end()) fail(ErrorCode::kUnknownId, "no class label for '" + query_id + "'");
    auto c = labels_.find(candidate_id);
    if (c == labels_.end())
      fail(ErrorCode::kUnknownId, "no class label for '" + candidate_id + "'");
    v = q->second == c->second ? cfg_.match_score : cfg_.mismatch_score;
  } else {
    auto q = features_.find(query_id);
    if (q == features_.end()) fail(ErrorCode::kUnknownId, "no features for '" + query_id + "'");
    auto c = features_.find(candidate_id);
    if (c == features_.end()) fail(ErrorCode::kUnknownId, "no features for '" + candidate_id + "'");
    const double cos = cosine_similarity(q->second, c->second);
    v = 1.0 / (1.0 + std::exp(-(cfg_.alpha * cos + cfg_.beta)));
  }
  if (cfg_.noise_scale > 0.0) {
    Rng rng(splitmix64(cfg_.seed ^ hash_bytes(query_id)) ^ splitmix64(hash_bytes(candidate_id)));
    std::normal_distribution<double> normal(0.0, cfg_.noise_scale);
    v += normal(rng);
  }
  return std::clamp(v, 0.0, 1.0);
}

// --- CachedOracle -----------------------------------------------------------

CachedOracle::CachedOracle(std::shared_ptr<const Oracle> inner) : inner_(std::move(inner)) {
  if (!inner_) fail(ErrorCode::kInvalidArgument, "CachedOracle needs an inner oracle");
}

double CachedOracle::score(const std::string& query_id, const std::string& candidate_id) const {
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find({query_id, candidate_id});
    if (it != cache_.end()) return it->second;
  }
  const double v = inner_->score(query_id, candidate_id);
  check_score(v, query_id, candidate_id);
  std::lock_guard lock(mu_);
  ++misses_;
  cache_.emplace(std::make_pair(query_id, candidate_id), v);
  return v;
}

std::vector<double> CachedOracle::score_many(const std::string& query_id,
                                             std::span<const std::string> candidate_ids) const {
  std::vector<double> out(candidate_ids.size());
  std::vector<std::string> missing;
  std::vector<std::size_t> slots;
  {
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < candidate_ids.size(); ++i) {
      auto it = cache_.find({query_id, candidate_ids[i]});
      if (it != cache_.end()) {
        out[i] = it->second;
      } else {
        missing.push_back(candidate_ids[i]);
        slots.push_back(i);
      }
    }
  }
  if (missing.empty()) return out;
  std::vector<double> fresh;
  if (inner_->capabilities().batched) {
    fresh = inner_->score_many(query_id, missing);
  } else {
    fresh.reserve(missing.size());
    for (const auto& c : missing) fresh.push_back(inner_->score(query_id, c));
  }
  if (fresh.size() != missing.size()) {
    fail(ErrorCode::kTransport, "inner oracle returned a misaligned batch");
  }
  std::lock_guard lock(mu_);
  for (std::size_t k = 0; k < missing.size(); ++k) {
    check_score(fresh[k], query_id, missing[k]);
    out[slots[k]] = fresh[k];
    cache_.emplace(std::make_pair(query_id, missing[k]), fresh[k]);
    ++misses_;
  }
  return out;
}

std::size_t CachedOracle::cached_count() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

std::size_t CachedOracle::miss_count() const {
  std::lock_guard lock(mu_);
  return misses_;
}

void CachedOracle::load_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  const auto me = identity();
  std::string line;
  std::getline(in, line);  // header
  std::lock_guard lock(mu_);
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    // The identity may itself contain ':' but never ','; ids never contain ','.
    auto f = detail::split(detail::trim(line), ',');
    double v = 0.0;
    if (f.size() != 4 || !detail::parse_double(f[3], v) || v < 0.0 || v > 1.0) {
      fail(ErrorCode::kMalformedHeader, "bad oracle cache row '" + line + "'");
    }
    if (f[0] != me) continue;
    cache_.emplace(std::make_pair(std::string(f[1]), std::string(f[2])), v);
  }
}

void CachedOracle::save_sidecar(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  const auto me = identity();
  out << "oracle,query_id,candidate_id,iou\n";
  std::lock_guard lock(mu_);
  for (const auto& [key, v] : cache_) {
    out << me << ',' << key.first << ',' << key.second << ',' << detail::format_double(v) << '\n';
  }
}

}  // namespace scs
