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

#include "scs/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "io_util.hpp"
#include "scs/error.hpp"
#include "scs/rng.hpp"

namespace scs {

std::size_t AgentParams::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

std::uint64_t AgentParams::checksum() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::vector<double>& xs) {
    for (double x : xs) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &x, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
    }
  };
  for (const auto& l : layers) {
    mix(l.weights);
    mix(l.bias);
  }
  return h;
}

AgentParams init_agent(const AgentConfig& cfg) {
  if (cfg.feature_dim == 0) fail(ErrorCode::kInvalidArgument, "agent feature_dim must be >= 1");
  std::vector<std::size_t> widths{cfg.input_dim()};
  for (std::size_t h : cfg.hidden_dims) {
    if (h == 0) fail(ErrorCode::kInvalidArgument, "agent hidden layer of width 0");
    widths.push_back(h);
  }
  widths.push_back(1);

  AgentParams params;
  params.feature_dim = cfg.feature_dim;
  params.seed = cfg.init_seed;
  Rng rng(cfg.init_seed);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer layer{widths[l], widths[l + 1], {}, {}};
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    std::uniform_real_distribution<double> u(-bound, bound);
    layer.weights.resize(layer.in * layer.out);
    for (auto& w : layer.weights) w = u(rng);
    layer.bias.assign(layer.out, 0.0);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

AgentParams zeros_like(const AgentParams& params) {
  AgentParams z = params;
  for (auto& l : z.layers) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
  return z;
}

bool same_shape(const AgentParams& a, const AgentParams& b) noexcept {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].in != b.layers[l].in || a.layers[l].out != b.layers[l].out) return false;
  }
  return true;
}

double score_pair(const AgentParams& params, std::span<const double> candidate,
                  std::span<const double> query, ForwardCache* cache) {
  if (candidate.size() != params.feature_dim || query.size() != params.feature_dim) {
    fail(ErrorCode::kDimensionMismatch,
         "agent expects feature dim " + std::to_string(params.feature_dim));
  }
  std::vector<double> x;
  x.reserve(2 * params.feature_dim);
  x.insert(x.end(), candidate.begin(), candidate.end());
  x.insert(x.end(), query.begin(), query.end());
  if (cache) {
    cache->input = x;
    cache->pre.clear();
    cache->post.clear();
  }

  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    std::vector<double> y(layer.bias);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double* w = layer.weights.data() + r * layer.in;
      double s = 0.0;
      for (std::size_t c = 0; c < layer.in; ++c) s += w[c] * x[c];
      y[r] += s;
    }
    const bool hidden = l + 1 < params.layers.size();
    if (cache) cache->pre.push_back(y);
    if (hidden) {
      for (auto& v : y) v = v > 0.0 ? v : 0.0;
      if (cache) cache->post.push_back(y);
    }
    x = std::move(y);
  }
  const double score = x.at(0);
  if (!std::isfinite(score)) fail(ErrorCode::kNonFinite, "agent produced a non-finite score");
  return score;
}

void backward(const AgentParams& params, const ForwardCache& cache, double upstream,
              AgentParams& grad) {
  std::vector<double> delta{upstream};
  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const auto& layer = params.layers[li];
    auto& g = grad.layers[li];
    const std::vector<double>& input = li == 0 ? cache.input : cache.post[li - 1];
    for (std::size_t r = 0; r < layer.out; ++r) {
      if (delta[r] == 0.0) continue;
      g.bias[r] += delta[r];
      double* gw = g.weights.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) gw[c] += delta[r] * input[c];
    }
    if (li == 0) break;
    std::vector<double> prev(layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      if (delta[r] == 0.0) continue;
      const double* w = layer.weights.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) prev[c] += w[c] * delta[r];
    }
    const auto& pre = cache.pre[li - 1];
    for (std::size_t c = 0; c < prev.size(); ++c) {
      if (!(pre[c] > 0.0)) prev[c] = 0.0;
    }
    delta = std::move(prev);
  }
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> p(scores.size());
  if (scores.empty()) return p;
  const double mx = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    p[i] = std::exp(scores[i] - mx);
    z += p[i];
  }
  for (auto& v : p) v /= z;
  return p;
}

SelectionDistribution make_distribution(std::vector<std::string> ids, std::vector<double> scores) {
  if (ids.size() != scores.size())
    fail(ErrorCode::kShapeMismatch, "ids and scores differ in length");
  SelectionDistribution dist;
  dist.probs = softmax(scores);
  dist.scores = std::move(scores);
  dist.pool_ids = std::move(ids);
  return dist;
}

SelectionDistribution score_candidates(const AgentParams& params, const CandidatePool& pool,
                                       const FeatureVector& query) {
  if (pool.empty()) fail(ErrorCode::kEmptyInput, "cannot score an empty candidate pool");
  std::vector<double> scores;
  scores.reserve(pool.size());
  for (const auto& cand : pool.features) {
    scores.push_back(score_pair(params, cand.values, query.values));
  }
  return make_distribution(pool.features.ids(), std::move(scores));
}

std::vector<std::string> select_top_n(const SelectionDistribution& dist, std::size_t n) {
  if (n > dist.size()) {
    fail(ErrorCode::kInvalidArgument,
         "n_shot " + std::to_string(n) + " exceeds pool size " + std::to_string(dist.size()));
  }
  std::vector<std::size_t> idx(dist.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (dist.probs[a] != dist.probs[b]) return dist.probs[a] > dist.probs[b];
    return dist.pool_ids[a] < dist.pool_ids[b];
  });
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(dist.pool_ids[idx[i]]);
  return out;
}

void write_checkpoint(std::ostream& out, const AgentParams& params) {
  out << "SCSA 1\n";
  out << "feature_dim " << params.feature_dim << '\n';
  out << "seed " << params.seed << '\n';
  out << "layers " << params.layers.size() << '\n';
  for (const auto& l : params.layers) out << "layer " << l.in << ' ' << l.out << '\n';
  out << "data\n";
  for (const auto& l : params.layers) {
    for (double w : l.weights) detail::write_le<float>(out, static_cast<float>(w));
    for (double b : l.bias) detail::write_le<float>(out, static_cast<float>(b));
  }
}

AgentParams read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "SCSA 1") {
    fail(ErrorCode::kMalformedHeader, "missing SCSA checkpoint header");
  }
  AgentParams params;
  std::size_t num_layers = 0;
  auto expect = [&](const std::string& key) {
    if (!std::getline(in, line) || line.rfind(key + ' ', 0) != 0) {
      fail(ErrorCode::kMalformedHeader, "checkpoint missing '" + key + "'");
    }
    return std::string_view(line).substr(key.size() + 1);
  };
  if (!detail::parse_int(expect("feature_dim"), params.feature_dim) ||
      !detail::parse_int(expect("seed"), params.seed) ||
      !detail::parse_int(expect("layers"), num_layers)) {
    fail(ErrorCode::kMalformedHeader, "bad checkpoint header value");
  }
  for (std::size_t l = 0; l < num_layers; ++l) {
    auto f = detail::split(expect("layer"), ' ');
    DenseLayer layer;
    if (f.size() != 2 || !detail::parse_int(f[0], layer.in) ||
        !detail::parse_int(f[1], layer.out) || layer.in == 0 || layer.out == 0) {
      fail(ErrorCode::kMalformedHeader, "bad checkpoint layer shape");
    }
    params.layers.push_back(std::move(layer));
  }
  if (params.layers.empty() || params.layers.front().in != 2 * params.feature_dim ||
      params.layers.back().out != 1) {
    fail(ErrorCode::kMalformedHeader, "checkpoint layer shapes do not chain from 2d to 1");
  }
  for (std::size_t l = 1; l < params.layers.size(); ++l) {
    if (params.layers[l].in != params.layers[l - 1].out) {
      fail(ErrorCode::kMalformedHeader, "checkpoint layer shapes do not chain");
    }
  }
  if (!std::getline(in, line) || line != "data") {
    fail(ErrorCode::kMalformedHeader, "checkpoint missing data marker");
  }
  auto read_block = [&](std::vector<double>& dst, std::size_t n) {
    dst.resize(n);
    for (auto& x : dst) {
      float f = 0.0f;
      if (!detail::read_le(in, f)) fail(ErrorCode::kMalformedHeader, "truncated checkpoint data");
      if (!std::isfinite(f)) fail(ErrorCode::kNonFinite, "checkpoint contains non-finite weight");
      x = f;
    }
  };
  for (auto& l : params.layers) {
    read_block(l.weights, l.in * l.out);
    read_block(l.bias, l.out);
  }
  return params;
}

void save_checkpoint(const AgentParams& params, const std::filesystem::path& path) {
  std::ostringstream buf(std::ios::binary);
  write_checkpoint(buf, params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  const auto bytes = buf.str();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

AgentParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace scs
