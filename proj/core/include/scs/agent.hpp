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
#include <span>
#include <string>
#include <vector>

#include "scs/features.hpp"
#include "scs/pool.hpp"

namespace scs {

enum class Activation { kRelu };

struct AgentConfig {
  std::size_t feature_dim = 1024;
  std::vector<std::size_t> hidden_dims{512};
  Activation activation = Activation::kRelu;
  std::uint64_t init_seed = 0;

  std::size_t input_dim() const noexcept { return 2 * feature_dim; }
};

/// Fully connected layer, y = W x + b with W stored row-major (out x in).
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;
};

/// Weights of the search agent: a shared MLP mapping [candidate; query] to a
/// scalar score. Gradients use the same type.
struct AgentParams {
  std::size_t feature_dim = 0;
  std::uint64_t seed = 0;
  std::vector<DenseLayer> layers;

  std::size_t parameter_count() const noexcept;
  /// FNV-1a over the raw bytes of every weight and bias.
  std::uint64_t checksum() const noexcept;
};

AgentParams init_agent(const AgentConfig& cfg);
AgentParams zeros_like(const AgentParams& params);
bool same_shape(const AgentParams& a, const AgentParams& b) noexcept;

/// Activations kept by a forward pass for backpropagation.
struct ForwardCache {
  std::vector<double> input;
  // pre[l] is layer l's affine output; post[l] its ReLU (hidden layers only).
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;
};

double score_pair(const AgentParams& params, std::span<const double> candidate,
                  std::span<const double> query, ForwardCache* cache = nullptr);

/// Accumulates d(score)/d(theta) * upstream into `grad`.
void backward(const AgentParams& params, const ForwardCache& cache, double upstream,
              AgentParams& grad);

struct SelectionDistribution {
  std::vector<double> scores;
  std::vector<double> probs;
  std::vector<std::string> pool_ids;

  std::size_t size() const noexcept { return probs.size(); }
};

/// Max-shifted softmax.
std::vector<double> softmax(std::span<const double> scores);

SelectionDistribution make_distribution(std::vector<std::string> ids, std::vector<double> scores);

/// Scores every pool member against `query` and normalizes with softmax.
SelectionDistribution score_candidates(const AgentParams& params, const CandidatePool& pool,
                                       const FeatureVector& query);

/// The n most probable ids, descending; equal probabilities order by id.
std::vector<std::string> select_top_n(const SelectionDistribution& dist, std::size_t n);

// "SCSA" checkpoint: text header then little-endian f32 blocks per layer
// (weights row-major, then bias).
void write_checkpoint(std::ostream& out, const AgentParams& params);
AgentParams read_checkpoint(std::istream& in);
void save_checkpoint(const AgentParams& params, const std::filesystem::path& path);
AgentParams load_checkpoint(const std::filesystem::path& path);

}  // namespace scs
