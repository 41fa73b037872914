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
#include <unordered_map>
#include <vector>

namespace scs {

/// One embedding with a stable sample id. Values are kept in double precision
/// in memory; the on-disk binary format stores f32.
struct FeatureVector {
  std::string id;
  std::vector<double> values;
};

/// Immutable, validated collection of equal-dimension embeddings with unique
/// ids. Construction checks every invariant; a FeatureSet that exists is valid.
class FeatureSet {
 public:
  FeatureSet() = default;
  FeatureSet(std::size_t dim, std::vector<FeatureVector> items, bool normalized = false);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  bool normalized() const noexcept { return normalized_; }

  const std::vector<FeatureVector>& items() const noexcept { return items_; }
  const FeatureVector& operator[](std::size_t i) const { return items_[i]; }
  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }

  std::optional<std::size_t> index_of(const std::string& id) const;
  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  /// Throws kUnknownId.
  const FeatureVector& at(const std::string& id) const;

  /// Items with the given ids, in the given order.
  FeatureSet subset(std::span<const std::string> ids) const;

  std::vector<std::string> ids() const;

 private:
  std::size_t dim_ = 0;
  std::vector<FeatureVector> items_;
  bool normalized_ = false;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class FeatureFormat { kBinary, kCsv };

/// `.csv` extension selects CSV; everything else is SCSF binary.
FeatureFormat format_from_path(const std::filesystem::path& path);

FeatureSet load_features(const std::filesystem::path& path, FeatureFormat format);
void save_features(const FeatureSet& set, const std::filesystem::path& path, FeatureFormat format);

// SCSF v1 stream codec, also embedded in the k-means model file.
void write_scsf(std::ostream& out, const FeatureSet& set);
FeatureSet read_scsf(std::istream& in);

FeatureSet read_features_csv(std::istream& in);
void write_features_csv(std::ostream& out, const FeatureSet& set);

/// Unit-L2 copy of `set`. Throws kZeroNorm naming the first vector whose
/// norm is below 1e-12.
FeatureSet l2_normalize(const FeatureSet& set);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// dot(a,b) / (|a||b|), clamped to [-1, 1].
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const FeatureVector& a, const FeatureVector& b);

struct SyntheticWorldConfig {
  std::size_t num_classes = 5;
  std::size_t samples_per_class = 40;
  std::size_t dim = 32;
  double noise_scale = 0.05;
  std::uint64_t seed = 0;
};

struct SyntheticWorld {
  FeatureSet features;
  std::map<std::string, int> labels;
};

/// Gaussian class prototypes plus per-sample Gaussian noise. Values are
/// rounded to f32 so the world survives a binary save/load unchanged.
SyntheticWorld generate_synthetic(const SyntheticWorldConfig& cfg);

std::string synthetic_id(std::size_t cls, std::size_t index);

}  // namespace scs
