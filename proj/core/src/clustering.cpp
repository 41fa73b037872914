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

#include "scs/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "io_util.hpp"
#include "scs/error.hpp"
#include "scs/rng.hpp"

namespace scs {

std::optional<std::size_t> KMeansModel::cluster_of(const std::string& id) const {
  auto it = assignments.find(id);
  if (it == assignments.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> KMeansModel::cluster_sizes() const {
  std::vector<std::size_t> sizes(centroids.size(), 0);
  for (const auto& [id, c] : assignments) ++sizes[c];
  return sizes;
}

namespace {

using Points = std::vector<std::span<const double>>;

std::size_t nearest(const std::vector<std::vector<double>>& centroids, std::span<const double> v) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < centroids.size(); ++m) {
    const double d = squared_distance(v, centroids[m]);
    if (d < best_d) {
      best_d = d;
      best = m;
    }
  }
  return best;
}

double total_cost(const Points& points, const std::vector<std::size_t>& labels,
                  const std::vector<std::vector<double>>& centroids) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    s += squared_distance(points[i], centroids[labels[i]]);
  }
  return s;
}

std::vector<std::size_t> init_random(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(m);
  return idx;
}

std::vector<std::size_t> init_plus_plus(const Points& points, std::size_t m, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<std::size_t> chosen;
  std::vector<bool> taken(n, false);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  chosen.push_back(first(rng));
  taken[chosen.back()] = true;
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < m) {
    const auto& last = points[chosen.back()];
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], last));
      if (!taken[i]) total += d2[i];
    }
    std::size_t next = n;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        next = i;
        r -= d2[i];
        if (r <= 0.0) break;
      }
    } else {
      // Remaining points coincide with chosen centroids; take the first free.
      for (std::size_t i = 0; i < n && next == n; ++i) {
        if (!taken[i]) next = i;
      }
    }
    chosen.push_back(next);
    taken[next] = true;
  }
  return chosen;
}

}  // namespace

KMeansModel kmeans_fit(const FeatureSet& set, const KMeansConfig& cfg) {
  if (set.empty()) fail(ErrorCode::kEmptyInput, "k-means on an empty feature set");
  if (cfg.num_clusters == 0) fail(ErrorCode::kInvalidArgument, "num_clusters must be >= 1");
  if (cfg.num_clusters > set.size()) {
    fail(ErrorCode::kInvalidArgument, "num_clusters M=" + std::to_string(cfg.num_clusters) +
                                          " exceeds sample count N=" + std::to_string(set.size()) +
                                          " (need M <= N)");
  }
  if (cfg.max_iters == 0) fail(ErrorCode::kInvalidArgument, "max_iters must be >= 1");
  if (!(cfg.tol >= 0.0)) fail(ErrorCode::kInvalidArgument, "tol must be >= 0");

  const std::size_t n = set.size();
  const std::size_t m = cfg.num_clusters;
  const std::size_t d = set.dim();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return set[a].id < set[b].id; });
  Points points;
  points.reserve(n);
  for (std::size_t i : order) points.emplace_back(set[i].values);

  Rng rng(cfg.seed);
  const auto seeds =
      cfg.init == KMeansInit::kRandom ? init_random(n, m, rng) : init_plus_plus(points, m, rng);
  std::vector<std::vector<double>> centroids;
  centroids.reserve(m);
  for (std::size_t s : seeds) centroids.emplace_back(points[s].begin(), points[s].end());

  KMeansModel model;
  model.dim = d;
  std::vector<std::size_t> labels(n, 0);
  std::vector<std::size_t> next(n, 0);
  double last_update_cost = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    for (std::size_t i = 0; i < n; ++i) next[i] = nearest(centroids, points[i]);
    model.iterations_run = iter + 1;
    if (iter > 0 && next == labels) {
      model.converged = true;
      break;
    }
    labels.swap(next);
    model.objective_trace.push_back(total_cost(points, labels, centroids));

    std::vector<std::vector<double>> sums(m, std::vector<double>(d, 0.0));
    std::vector<std::size_t> counts(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& acc = sums[labels[i]];
      for (std::size_t j = 0; j < d; ++j) acc[j] += points[i][j];
      ++counts[labels[i]];
    }
    for (std::size_t c = 0; c < m; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < d; ++j)
        centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
    }
    for (std::size_t c = 0; c < m; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[labels[i]] < 2) continue;
        const double dist = squared_distance(points[i], centroids[labels[i]]);
        if (dist > far_d) {
          far_d = dist;
          far = i;
        }
      }
      if (far == n) break;
      --counts[labels[far]];
      labels[far] = c;
      counts[c] = 1;
      centroids[c].assign(points[far].begin(), points[far].end());
    }

    const double cost = total_cost(points, labels, centroids);
    model.objective_trace.push_back(cost);
    if (cfg.tol > 0.0 && last_update_cost - cost < cfg.tol) {
      model.converged = true;
      break;
    }
    last_update_cost = cost;
  }

  model.centroids = std::move(centroids);
  for (std::size_t i = 0; i < n; ++i) model.assignments.emplace(set[order[i]].id, labels[i]);
  model.objective = total_cost(points, labels, model.centroids);
  return model;
}

std::size_t assign(const KMeansModel& model, std::span<const double> v) {
  if (v.size() != model.dim) {
    fail(ErrorCode::kDimensionMismatch, "vector dim " + std::to_string(v.size()) +
                                            " does not match model dim " +
                                            std::to_string(model.dim));
  }
  if (model.centroids.empty()) fail(ErrorCode::kInvalidArgument, "model has no centroids");
  return nearest(model.centroids, v);
}

std::size_t assign(const KMeansModel& model, const FeatureVector& v) {
  return assign(model, std::span<const double>(v.values));
}

double objective(const KMeansModel& model, const FeatureSet& set) {
  if (set.dim() != model.dim) fail(ErrorCode::kDimensionMismatch, "model/set dimension mismatch");
  double s = 0.0;
  for (const auto& item : set) {
    auto c = model.cluster_of(item.id);
    if (!c) fail(ErrorCode::kUnknownId, "sample '" + item.id + "' has no cluster assignment");
    s += squared_distance(item.values, model.centroids[*c]);
  }
  return s;
}

void write_model(std::ostream& out, const KMeansModel& model) {
  out << "SCSK 1\n";
  out << "M=" << model.num_clusters() << '\n';
  out << "d=" << model.dim << '\n';
  out << "iterations=" << model.iterations_run << '\n';
  out << "converged=" << (model.converged ? 1 : 0) << '\n';
  out << "objective=" << detail::format_double(model.objective) << '\n';
  out << "centroids\n";
  std::vector<FeatureVector> cents;
  for (std::size_t c = 0; c < model.centroids.size(); ++c) {
    cents.push_back({std::to_string(c), model.centroids[c]});
  }
  write_scsf(out, FeatureSet(model.dim, std::move(cents)));
  out << "\nassignments\n";
  for (const auto& [id, c] : model.assignments) out << id << ',' << c << '\n';
}

KMeansModel read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "SCSK 1") {
    fail(ErrorCode::kMalformedHeader, "missing SCSK model header");
  }
  KMeansModel model;
  std::size_t m = 0;
  bool have_m = false, have_d = false;
  while (std::getline(in, line) && line != "centroids") {
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kMalformedHeader, "bad model line '" + line + "'");
    const std::string_view key(line.data(), eq);
    const std::string_view val(line.data() + eq + 1, line.size() - eq - 1);
    bool ok = true;
    if (key == "M") {
      ok = detail::parse_int(val, m);
      have_m = true;
    } else if (key == "d") {
      ok = detail::parse_int(val, model.dim);
      have_d = true;
    } else if (key == "iterations") {
      ok = detail::parse_int(val, model.iterations_run);
    } else if (key == "converged") {
      int flag = 0;
      ok = detail::parse_int(val, flag);
      model.converged = flag != 0;
    } else if (key == "objective") {
      ok = detail::parse_double(val, model.objective);
    }
    if (!ok) fail(ErrorCode::kMalformedHeader, "bad value in model line '" + line + "'");
  }
  if (!have_m || !have_d) fail(ErrorCode::kMalformedHeader, "model header lacks M or d");
  const auto cents = read_scsf(in);
  if (cents.size() != m || cents.dim() != model.dim) {
    fail(ErrorCode::kMalformedHeader, "centroid block does not match header");
  }
  for (const auto& c : cents) model.centroids.push_back(c.values);
  std::getline(in, line);  // newline after the binary block
  if (!std::getline(in, line) || line != "assignments") {
    fail(ErrorCode::kMalformedHeader, "missing assignments table");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    std::size_t c = 0;
    if (comma == std::string::npos ||
        !detail::parse_int(std::string_view(line).substr(comma + 1), c) || c >= m) {
      fail(ErrorCode::kMalformedHeader, "bad assignment row '" + line + "'");
    }
    if (!model.assignments.emplace(line.substr(0, comma), c).second) {
      fail(ErrorCode::kDuplicateId, "duplicate assignment for '" + line.substr(0, comma) + "'");
    }
  }
  return model;
}

void save_model(const KMeansModel& model, const std::filesystem::path& path) {
  std::ostringstream buf(std::ios::binary);
  write_model(buf, model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  const auto bytes = buf.str();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

KMeansModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open model '" + path.string() + "'");
  return read_model(in);
}

}  // namespace scs
