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

#include "scs/analysis.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "io_util.hpp"
#include "scs/error.hpp"
#include "scs/rng.hpp"

namespace scs {

namespace {

std::vector<std::size_t> eligible(const FeatureVector& query, const FeatureSet& candidates,
                                  const AnalysisOptions& opts) {
  std::vector<std::size_t> idx;
  idx.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (opts.exclude_self && candidates[i].id == query.id) continue;
    idx.push_back(i);
  }
  return idx;
}

void check_inputs(const FeatureSet& queries, const FeatureSet& candidates) {
  if (candidates.empty()) fail(ErrorCode::kEmptyInput, "no candidates to select from");
  if (!queries.empty() && queries.dim() != candidates.dim()) {
    fail(ErrorCode::kDimensionMismatch, "queries and candidates differ in dimension");
  }
}

void require_available(std::size_t need, std::size_t have, const std::string& query_id) {
  if (need > have) {
    fail(ErrorCode::kInvalidArgument, "n_shot " + std::to_string(need) + " exceeds the " +
                                          std::to_string(have) +
                                          " candidates available to query '" + query_id + "'");
  }
}

double selection_reward(const Oracle& oracle, const std::string& query_id,
                        const std::vector<std::string>& selected) {
  return score_batch(oracle, query_id, selected).avg;
}

void finish(StrategyResult& r) {
  r.mean_reward = r.rewards.empty() ? 0.0
                                    : std::accumulate(r.rewards.begin(), r.rewards.end(), 0.0) /
                                          static_cast<double>(r.rewards.size());
}

}  // namespace

std::vector<std::size_t> rank_by_similarity(const FeatureVector& query,
                                            const FeatureSet& candidates, SimilarityMode mode,
                                            const AnalysisOptions& opts) {
  auto idx = eligible(query, candidates, opts);
  std::vector<double> sim(candidates.size(), 0.0);
  for (std::size_t i : idx) sim[i] = cosine_similarity(query, candidates[i]);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (sim[a] != sim[b])
      return mode == SimilarityMode::kNearest ? sim[a] > sim[b] : sim[a] < sim[b];
    return candidates[a].id < candidates[b].id;
  });
  return idx;
}

VarianceReport random_baseline(const FeatureSet& queries, const FeatureSet& candidates,
                               const Oracle& oracle, std::size_t n_shot,
                               std::span<const std::uint64_t> seeds, const AnalysisOptions& opts) {
  check_inputs(queries, candidates);
  if (n_shot == 0) fail(ErrorCode::kInvalidArgument, "n_shot must be >= 1");
  if (seeds.empty()) fail(ErrorCode::kInvalidArgument, "random baseline needs at least one seed");
  VarianceReport report;
  report.seeds.assign(seeds.begin(), seeds.end());
  for (std::uint64_t seed : seeds) {
    Rng rng(seed);
    StrategyResult run;
    run.name = "random/seed=" + std::to_string(seed);
    for (const auto& q : queries) {
      auto pool = eligible(q, candidates, opts);
      require_available(n_shot, pool.size(), q.id);
      std::vector<std::string> chosen;
      for (std::size_t i = 0; i < n_shot; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
        chosen.push_back(candidates[pool[i]].id);
      }
      run.rewards.push_back(selection_reward(oracle, q.id, chosen));
      run.query_ids.push_back(q.id);
      run.selections.push_back(std::move(chosen));
    }
    finish(run);
    report.runs.push_back(std::move(run));
  }
  report.best = report.worst = report.runs.front().mean_reward;
  double total = 0.0;
  for (const auto& r : report.runs) {
    report.best = std::max(report.best, r.mean_reward);
    report.worst = std::min(report.worst, r.mean_reward);
    total += r.mean_reward;
  }
  report.mean =
      std::clamp(total / static_cast<double>(report.runs.size()), report.worst, report.best);
  return report;
}

StrategyResult similarity_baseline(const FeatureSet& queries, const FeatureSet& candidates,
                                   const Oracle& oracle, SimilarityMode mode, std::size_t n_shot,
                                   const AnalysisOptions& opts) {
  check_inputs(queries, candidates);
  if (n_shot == 0) fail(ErrorCode::kInvalidArgument, "n_shot must be >= 1");
  StrategyResult r;
  r.name = mode == SimilarityMode::kNearest ? "nearest" : "farthest";
  for (const auto& q : queries) {
    const auto ranked = rank_by_similarity(q, candidates, mode, opts);
    require_available(n_shot, ranked.size(), q.id);
    std::vector<std::string> chosen;
    for (std::size_t i = 0; i < n_shot; ++i) chosen.push_back(candidates[ranked[i]].id);
    r.rewards.push_back(selection_reward(oracle, q.id, chosen));
    r.query_ids.push_back(q.id);
    r.selections.push_back(std::move(chosen));
  }
  finish(r);
  return r;
}

DiversityResult diversity_comparison(const FeatureSet& queries, const FeatureSet& candidates,
                                     const Oracle& oracle, const AnalysisOptions& opts) {
  check_inputs(queries, candidates);
  DiversityResult out;
  out.nn.name = "NN";
  out.ff.name = "FF";
  out.nf.name = "NF";
  for (const auto& q : queries) {
    const auto near = rank_by_similarity(q, candidates, SimilarityMode::kNearest, opts);
    const auto far = rank_by_similarity(q, candidates, SimilarityMode::kFarthest, opts);
    if (near.size() < 2) {
      fail(ErrorCode::kInvalidArgument,
           "diversity comparison needs >= 2 candidates for query '" + q.id + "'");
    }
    // With fully tied similarities both orderings start at the same id; the
    // farthest partner is then the first one that differs.
    const std::size_t nf_far = far[0] != near[0] ? far[0] : far[1];
    const std::vector<std::string> nn{candidates[near[0]].id, candidates[near[1]].id};
    const std::vector<std::string> ff{candidates[far[0]].id, candidates[far[1]].id};
    const std::vector<std::string> nf{candidates[near[0]].id, candidates[nf_far].id};
    const std::pair<StrategyResult*, const std::vector<std::string>*> rows[] = {
        {&out.nn, &nn}, {&out.ff, &ff}, {&out.nf, &nf}};
    for (const auto& [result, selected] : rows) {
      result->query_ids.push_back(q.id);
      result->rewards.push_back(selection_reward(oracle, q.id, *selected));
      result->selections.push_back(*selected);
    }
  }
  finish(out.nn);
  finish(out.ff);
  finish(out.nf);
  return out;
}

WinnerProportions winner_proportions(const StrategyResult& nearest,
                                     const StrategyResult& farthest) {
  if (nearest.query_ids != farthest.query_ids ||
      nearest.rewards.size() != nearest.query_ids.size() ||
      farthest.rewards.size() != farthest.query_ids.size()) {
    fail(ErrorCode::kShapeMismatch, "strategy results cover different queries");
  }
  WinnerProportions p;
  const std::size_t n = nearest.rewards.size();
  if (n == 0) fail(ErrorCode::kEmptyInput, "no queries to compare");
  std::size_t nw = 0, fw = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (nearest.rewards[i] > farthest.rewards[i]) {
      ++nw;
    } else if (farthest.rewards[i] > nearest.rewards[i]) {
      ++fw;
    }
  }
  const auto total = static_cast<double>(n);
  p.nearest_wins = static_cast<double>(nw) / total;
  p.farthest_wins = static_cast<double>(fw) / total;
  p.ties = static_cast<double>(n - nw - fw) / total;
  return p;
}

void write_strategy_csv(std::ostream& out, std::span<const StrategyResult> results) {
  out << "query_id,strategy,selected,reward\n";
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.query_ids.size(); ++i) {
      out << r.query_ids[i] << ',' << r.name << ',';
      for (std::size_t k = 0; k < r.selections[i].size(); ++k) {
        if (k) out << ';';
        out << r.selections[i][k];
      }
      out << ',' << detail::format_double(r.rewards[i]) << '\n';
    }
  }
}

void write_variance_csv(std::ostream& out, const VarianceReport& report) {
  out << "seed,mean_reward\n";
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    out << report.seeds[i] << ',' << detail::format_double(report.runs[i].mean_reward) << '\n';
  }
  out << "\n# summary\n";
  out << "# seeds=" << report.seeds.size() << '\n';
  out << "# best=" << detail::format_double(report.best) << '\n';
  out << "# worst=" << detail::format_double(report.worst) << '\n';
  out << "# mean=" << detail::format_double(report.mean) << '\n';
}

void write_winners_csv(std::ostream& out, const WinnerProportions& p) {
  out << "p_nearest_wins,p_farthest_wins,p_ties\n";
  out << detail::format_double(p.nearest_wins) << ',' << detail::format_double(p.farthest_wins)
      << ',' << detail::format_double(p.ties) << '\n';
}

void write_summary(std::ostream& out, std::span<const StrategyResult> results) {
  for (const auto& r : results) {
    out << r.name << ": queries=" << r.query_ids.size()
        << " mean_reward=" << detail::format_double(r.mean_reward) << '\n';
  }
}

}  // namespace scs
