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

#include "scs_cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "scs/analysis.hpp"
#include "scs/pool.hpp"
#include "scs/remote_oracle.hpp"
#include "scs/rng.hpp"

namespace scs::cli {

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return kExitUsage;
    case ErrorCode::kOracle:
    case ErrorCode::kTransport:
    case ErrorCode::kOutOfRange:
      return kExitOracle;
    default:
      return kExitData;
  }
}

namespace {

std::filesystem::path out_file(const PipelineConfig& cfg, const char* name) {
  return cfg.out_dir / name;
}

void ensure_out_dir(const PipelineConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + cfg.out_dir.string() + "'");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

std::size_t as_size(std::uint64_t v) { return static_cast<std::size_t>(v); }

std::vector<std::size_t> parse_widths(const std::vector<std::string>& items) {
  std::vector<std::size_t> out;
  for (const auto& s : items) {
    std::size_t w = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), w);
    if (ec != std::errc() || ptr != s.data() + s.size() || w == 0) {
      fail(ErrorCode::kInvalidArgument,
           "agent.hidden_dims entry '" + s + "' is not a positive integer");
    }
    out.push_back(w);
  }
  return out;
}

// Oracle plus the memo layer when a cache sidecar is configured.
struct OracleHandle {
  std::shared_ptr<const Oracle> oracle;
  std::shared_ptr<CachedOracle> cache;
  std::filesystem::path cache_path;

  void persist() const {
    if (cache) cache->save_sidecar(cache_path);
  }
};

OracleHandle open_oracle(const PipelineConfig& cfg, std::span<const FeatureSet> sets) {
  OracleHandle h;
  h.oracle = make_oracle(cfg.oracle, sets);
  if (!cfg.oracle.cache.empty()) {
    h.cache = std::make_shared<CachedOracle>(h.oracle);
    h.cache_path = cfg.oracle.cache;
    h.cache->load_sidecar(h.cache_path);
    h.oracle = h.cache;
  }
  return h;
}

CandidatePool load_pool(const PipelineConfig& cfg, const FeatureSet& train) {
  const auto manifest = out_file(cfg, kManifestFile);
  if (!std::filesystem::exists(manifest)) {
    fail(ErrorCode::kIo,
         "missing pool manifest '" + manifest.string() + "' (run build-pool first)");
  }
  return pool_from_entries(load_manifest(manifest), train);
}

}  // namespace

PipelineConfig resolve(const Config& c) {
  PipelineConfig p;
  p.seed = c.get_uint("run.seed", 0);
  p.out_dir = c.get_string("run.out", "out");
  p.train_features = c.get_string("data.train", "");
  p.query_features = c.get_string("data.queries", p.train_features.string());
  p.normalize = c.get_bool("data.normalize", true);

  p.synth.num_classes = as_size(c.get_uint("synth.num_classes", 5));
  p.synth.samples_per_class = as_size(c.get_uint("synth.samples_per_class", 40));
  p.synth.dim = as_size(c.get_uint("synth.dim", 32));
  p.synth.noise_scale = c.get_double("synth.noise_scale", 0.05);
  p.synth.seed = derive_seed(p.seed, "synth");

  p.kmeans.num_clusters = as_size(c.get_uint("kmeans.num_clusters", 10));
  p.kmeans.max_iters = as_size(c.get_uint("kmeans.max_iters", 300));
  p.kmeans.tol = c.get_double("kmeans.tol", 0.0);
  const auto init = c.get_string("kmeans.init", "random");
  if (init == "random") {
    p.kmeans.init = KMeansInit::kRandom;
  } else if (init == "kmeans++") {
    p.kmeans.init = KMeansInit::kPlusPlus;
  } else {
    fail(ErrorCode::kInvalidArgument, "kmeans.init must be 'random' or 'kmeans++'");
  }
  p.kmeans.seed = derive_seed(p.seed, "kmeans");

  if (c.has("agent.hidden_dims"))
    p.agent.hidden_dims = parse_widths(c.get_list("agent.hidden_dims"));
  p.agent.init_seed = derive_seed(p.seed, "init");

  p.train.epochs = as_size(c.get_uint("train.epochs", 10));
  p.train.batch_size = as_size(c.get_uint("train.batch_size", 8));
  p.train.lr0 = c.get_double("train.lr0", 1e-3);
  p.train.lr_halving_period = as_size(c.get_uint("train.lr_halving_period", 5));
  p.train.adam_beta1 = c.get_double("train.beta1", 0.9);
  p.train.adam_beta2 = c.get_double("train.beta2", 0.999);
  p.train.adam_eps = c.get_double("train.eps", 1e-8);
  p.train.clip_norm = c.get_double("train.clip_norm", 0.0);
  p.train.seed = derive_seed(p.seed, "shuffle");
  validate(p.train);
  p.checkpoint_every_epoch = c.get_bool("train.checkpoint_every_epoch", false);

  auto& o = p.oracle;
  o.mode = c.get_string("oracle.mode", "class_match");
  o.labels = c.get_string("oracle.labels", "");
  o.matrix = c.get_string("oracle.matrix", "");
  o.endpoint = c.get_string("oracle.endpoint", "");
  o.timeout_ms = c.get_uint("oracle.timeout_ms", 30000);
  o.max_retries = c.get_uint("oracle.max_retries", 3);
  o.max_in_flight = c.get_uint("oracle.max_in_flight", 4);
  o.cache = c.get_string("oracle.cache", "");
  o.simulated.match_score = c.get_double("oracle.match_score", 0.8);
  o.simulated.mismatch_score = c.get_double("oracle.mismatch_score", 0.2);
  o.simulated.alpha = c.get_double("oracle.alpha", 1.0);
  o.simulated.beta = c.get_double("oracle.beta", 0.0);
  o.simulated.noise_scale = c.get_double("oracle.noise_scale", 0.0);
  o.simulated.seed = derive_seed(p.seed, "oracle");
  if (o.mode != "class_match" && o.mode != "cosine_sigmoid" && o.mode != "matrix" &&
      o.mode != "remote") {
    fail(ErrorCode::kInvalidArgument,
         "oracle.mode must be one of class_match, cosine_sigmoid, matrix, remote");
  }

  p.select_queries = c.get_list("select.queries");
  p.select_n_shot = as_size(c.get_uint("select.n_shot", 1));

  p.protocol = c.get_string("analyze.protocol", "similarity");
  p.analyze_n_shot = as_size(c.get_uint("analyze.n_shot", 1));
  for (const auto& s : c.get_list("analyze.seeds")) {
    Config one;
    one.set("seed", s);
    p.analyze_seeds.push_back(one.get_uint("seed", 0));
  }
  if (p.analyze_seeds.empty()) {
    for (int i = 0; i < 5; ++i)
      p.analyze_seeds.push_back(derive_seed(p.seed, "random" + std::to_string(i)));
  }
  p.exclude_self = c.get_bool("analyze.exclude_self", true);
  return p;
}

FeatureSet load_pipeline_features(const std::filesystem::path& path, bool normalize) {
  if (path.empty()) fail(ErrorCode::kInvalidArgument, "no feature file configured (data.train)");
  if (!std::filesystem::exists(path))
    fail(ErrorCode::kIo, "feature file '" + path.string() + "' not found");
  auto set = load_features(path, format_from_path(path));
  return normalize ? l2_normalize(set) : set;
}

std::map<std::string, int> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open label file '" + path.string() + "'");
  std::map<std::string, int> labels;
  std::string line;
  std::getline(in, line);
  if (line.rfind("id,label", 0) != 0)
    fail(ErrorCode::kMalformedHeader, "label file must start with 'id,label'");
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.rfind(',');
    int label = 0;
    const auto tail = std::string_view(line).substr(comma + 1);
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), label);
    if (comma == std::string::npos || ec != std::errc()) {
      fail(ErrorCode::kMalformedHeader, "bad label row '" + line + "'");
    }
    (void)ptr;
    if (!labels.emplace(line.substr(0, comma), label).second) {
      fail(ErrorCode::kDuplicateId, "duplicate label for '" + line.substr(0, comma) + "'");
    }
  }
  return labels;
}

void save_labels(const std::map<std::string, int>& labels, const std::filesystem::path& path) {
  std::ostringstream s;
  s << "id,label\n";
  for (const auto& [id, label] : labels) s << id << ',' << label << '\n';
  write_text(path, s.str());
}

std::shared_ptr<const Oracle> make_oracle(const OracleSettings& settings,
                                          std::span<const FeatureSet> feature_sets) {
  if (settings.mode == "class_match") {
    if (settings.labels.empty())
      fail(ErrorCode::kInvalidArgument, "class_match oracle needs oracle.labels");
    auto cfg = settings.simulated;
    cfg.mode = SimulatedMode::kClassMatch;
    return std::make_shared<SimulatedOracle>(load_labels(settings.labels), cfg);
  }
  if (settings.mode == "cosine_sigmoid") {
    auto cfg = settings.simulated;
    cfg.mode = SimulatedMode::kCosineSigmoid;
    return std::make_shared<SimulatedOracle>(feature_sets, cfg);
  }
  if (settings.mode == "matrix") {
    if (settings.matrix.empty()) fail(ErrorCode::kInvalidArgument, "matrix oracle needs oracle.matrix");
    return std::make_shared<MatrixOracle>(MatrixOracle::load(settings.matrix));
  }
  if (settings.mode == "remote") {
    RemoteOracleConfig rc;
    rc.endpoint = settings.endpoint;
    rc.timeout = std::chrono::milliseconds(settings.timeout_ms);
    rc.max_retries = static_cast<std::size_t>(settings.max_retries);
    rc.max_in_flight = static_cast<std::size_t>(settings.max_in_flight);
    return std::make_shared<RemoteOracle>(rc);
  }
  fail(ErrorCode::kInvalidArgument, "unknown oracle mode '" + settings.mode + "'");
}

void cmd_gen_synth(const PipelineConfig& cfg, std::ostream& log) {
  ensure_out_dir(cfg);
  const auto world = generate_synthetic(cfg.synth);
  save_features(world.features, out_file(cfg, kSynthFeaturesFile), FeatureFormat::kBinary);
  save_labels(world.labels, out_file(cfg, kSynthLabelsFile));
  log << "generated " << world.features.size() << " samples (" << cfg.synth.num_classes
      << " classes, d=" << cfg.synth.dim << ") -> " << out_file(cfg, kSynthFeaturesFile).string()
      << '\n';
}

void cmd_cluster(const PipelineConfig& cfg, std::ostream& log) {
  const auto set = load_pipeline_features(cfg.train_features, cfg.normalize);
  const auto model = kmeans_fit(set, cfg.kmeans);
  ensure_out_dir(cfg);
  save_model(model, out_file(cfg, kModelFile));

  std::ostringstream sizes;
  sizes << "cluster,size\n";
  const auto counts = model.cluster_sizes();
  for (std::size_t c = 0; c < counts.size(); ++c) sizes << c << ',' << counts[c] << '\n';
  write_text(out_file(cfg, kClusterSizesFile), sizes.str());

  log << "clustered " << set.size() << " samples into M=" << model.num_clusters()
      << " clusters (iterations=" << model.iterations_run
      << ", converged=" << (model.converged ? "yes" : "no")
      << ", objective=" << fmt(model.objective, 6) << ")\n";
  for (std::size_t c = 0; c < counts.size(); ++c)
    log << "  cluster " << c << ": " << counts[c] << '\n';
}

void cmd_build_pool(const PipelineConfig& cfg, std::ostream& log) {
  const auto model_path = out_file(cfg, kModelFile);
  if (!std::filesystem::exists(model_path)) {
    fail(ErrorCode::kIo, "missing k-means model '" + model_path.string() + "' (run cluster first)");
  }
  const auto model = load_model(model_path);
  const auto set = load_pipeline_features(cfg.train_features, cfg.normalize);
  const auto pool = build_pool(model, set);
  ensure_out_dir(cfg);
  save_manifest(pool, out_file(cfg, kManifestFile));
  save_features(pool.features, out_file(cfg, kPoolFeaturesFile), FeatureFormat::kBinary);
  std::size_t singletons = 0;
  for (auto n : model.cluster_sizes()) singletons += n == 1;
  log << "candidate pool: " << pool.size() << " samples from " << model.num_clusters()
      << " clusters (" << singletons << " singleton) -> " << out_file(cfg, kManifestFile).string()
      << '\n';
}

void cmd_train(const PipelineConfig& cfg, std::ostream& log) {
  const auto train = load_pipeline_features(cfg.train_features, cfg.normalize);
  const auto pool = load_pool(cfg, train);
  const FeatureSet sets[] = {train};
  const auto oracle = open_oracle(cfg, sets);

  auto agent_cfg = cfg.agent;
  agent_cfg.feature_dim = train.dim();
  ensure_out_dir(cfg);
  EpochCallback on_epoch = [&](const EpochStats& e, const AgentParams& params) {
    log << "epoch " << e.epoch << " lr=" << e.lr << " loss=" << fmt(e.mean_loss, 6)
        << " top1_reward=" << fmt(e.mean_top1_reward) << '\n';
    if (cfg.checkpoint_every_epoch) {
      save_checkpoint(params, cfg.out_dir / ("agent_epoch" + std::to_string(e.epoch) + ".scsa"));
    }
  };
  const auto result = train_agent(train, pool, *oracle.oracle, cfg.train, agent_cfg, on_epoch);
  save_checkpoint(result.params, out_file(cfg, kCheckpointFile));
  std::ostringstream report;
  write_report_csv(report, result.report);
  write_text(out_file(cfg, kTrainReportFile), report.str());

  double optimal = 0.0;
  double uniform = 0.0;
  const auto ids = pool.ids();
  for (const auto& q : train) {
    const auto rec = score_batch(*oracle.oracle, q.id, ids);
    optimal += *std::max_element(rec.ious.begin(), rec.ious.end());
    uniform += rec.avg;
  }
  oracle.persist();
  const double n = train.empty() ? 1.0 : static_cast<double>(train.size());
  const double final_reward = result.report.epochs.empty()
                                  ? result.report.initial_mean_top1_reward
                                  : result.report.epochs.back().mean_top1_reward;
  log << "final mean top-1 reward: " << fmt(final_reward) << " (oracle-optimal " << fmt(optimal / n)
      << ", uniform-random " << fmt(uniform / n) << ", initial "
      << fmt(result.report.initial_mean_top1_reward) << ")\n";
}

void cmd_select(const PipelineConfig& cfg, std::ostream& log) {
  const auto train = load_pipeline_features(cfg.train_features, cfg.normalize);
  const auto queries = load_pipeline_features(cfg.query_features, cfg.normalize);
  const auto pool = load_pool(cfg, train);
  const auto ckpt = out_file(cfg, kCheckpointFile);
  if (!std::filesystem::exists(ckpt)) {
    fail(ErrorCode::kIo, "missing checkpoint '" + ckpt.string() + "' (run train first)");
  }
  const auto params = load_checkpoint(ckpt);
  if (cfg.select_n_shot == 0 || cfg.select_n_shot > pool.size()) {
    fail(ErrorCode::kInvalidArgument, "n_shot " + std::to_string(cfg.select_n_shot) +
                                          " must be in [1, pool size " +
                                          std::to_string(pool.size()) + "]");
  }
  const auto ids = cfg.select_queries.empty() ? queries.ids() : cfg.select_queries;

  std::ostringstream csv;
  csv << "query_id,rank,candidate_id,probability\n";
  for (const auto& qid : ids) {
    const auto& q = queries.at(qid);
    const auto dist = score_candidates(params, pool, q);
    const auto top = select_top_n(dist, cfg.select_n_shot);
    for (std::size_t r = 0; r < top.size(); ++r) {
      const auto it = std::find(dist.pool_ids.begin(), dist.pool_ids.end(), top[r]);
      const double prob = dist.probs[static_cast<std::size_t>(it - dist.pool_ids.begin())];
      std::ostringstream p;
      p << std::setprecision(9) << prob;
      csv << qid << ',' << r << ',' << top[r] << ',' << p.str() << '\n';
    }
  }
  ensure_out_dir(cfg);
  write_text(out_file(cfg, kSelectionFile), csv.str());
  log << "selected " << cfg.select_n_shot << " context(s) for " << ids.size() << " queries -> "
      << out_file(cfg, kSelectionFile).string() << '\n';
}

void cmd_analyze(const PipelineConfig& cfg, std::ostream& log) {
  const auto candidates = load_pipeline_features(cfg.train_features, cfg.normalize);
  const auto queries = load_pipeline_features(cfg.query_features, cfg.normalize);
  const FeatureSet sets[] = {candidates, queries};
  const auto oracle = open_oracle(cfg, sets);
  AnalysisOptions opts;
  opts.exclude_self = cfg.exclude_self;
  ensure_out_dir(cfg);

  if (cfg.protocol == "random") {
    const auto report = random_baseline(queries, candidates, *oracle.oracle, cfg.analyze_n_shot,
                                        cfg.analyze_seeds, opts);
    std::ostringstream var, rows;
    write_variance_csv(var, report);
    write_strategy_csv(rows, report.runs);
    write_text(cfg.out_dir / "random_variance.csv", var.str());
    write_text(cfg.out_dir / "random_queries.csv", rows.str());
    log << "random baseline over " << report.seeds.size() << " seeds: best=" << fmt(report.best)
        << " worst=" << fmt(report.worst) << " mean=" << fmt(report.mean) << '\n';
  } else if (cfg.protocol == "similarity") {
    const StrategyResult results[] = {
        similarity_baseline(queries, candidates, *oracle.oracle, SimilarityMode::kNearest,
                            cfg.analyze_n_shot, opts),
        similarity_baseline(queries, candidates, *oracle.oracle, SimilarityMode::kFarthest,
                            cfg.analyze_n_shot, opts)};
    const auto winners = winner_proportions(results[0], results[1]);
    std::ostringstream rows, win, summary;
    write_strategy_csv(rows, results);
    write_winners_csv(win, winners);
    write_summary(summary, results);
    write_text(cfg.out_dir / "similarity_queries.csv", rows.str());
    write_text(cfg.out_dir / "winners.csv", win.str());
    write_text(cfg.out_dir / "similarity_summary.txt", summary.str());
    log << summary.str() << "nearest wins " << fmt(winners.nearest_wins) << ", farthest wins "
        << fmt(winners.farthest_wins) << ", ties " << fmt(winners.ties) << '\n';
  } else if (cfg.protocol == "diversity") {
    const auto div = diversity_comparison(queries, candidates, *oracle.oracle, opts);
    const StrategyResult results[] = {div.nn, div.ff, div.nf};
    std::ostringstream rows, summary;
    write_strategy_csv(rows, results);
    write_summary(summary, results);
    write_text(cfg.out_dir / "diversity_queries.csv", rows.str());
    write_text(cfg.out_dir / "diversity_summary.txt", summary.str());
    log << summary.str();
  } else {
    fail(ErrorCode::kInvalidArgument, "protocol must be random, similarity, or diversity");
  }
  oracle.persist();
}

int run(int argc, char** argv, char** env, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "Stepwise context search: cluster, build a candidate pool, train and apply the "
      "context-selection agent"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> assignments;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "key=value config file with [section] headers");
  app.add_option("--seed", seed, "global seed (overrides run.seed)");
  app.add_option("--out", out_dir, "output directory (overrides run.out)");
  app.add_option("--set", assignments, "override a config key: section.key=value");

  auto* gen = app.add_subcommand("gen-synth", "write a seeded synthetic feature world");
  auto* cluster = app.add_subcommand("cluster", "fit k-means over the training features");
  auto* pool = app.add_subcommand("build-pool", "extract the nearest/farthest candidate pool");
  auto* train = app.add_subcommand("train", "train the search agent with REINFORCE");
  auto* select = app.add_subcommand("select", "pick context examples for queries");
  auto* analyze = app.add_subcommand("analyze", "run a context-selection analysis protocol");

  std::string query_list;
  std::optional<std::uint64_t> select_n;
  select->add_option("--queries", query_list, "comma-separated query ids (default: all)");
  select->add_option("--n-shot", select_n, "contexts per query");
  std::string protocol;
  std::optional<std::uint64_t> analyze_n;
  analyze->add_option("--protocol", protocol, "random | similarity | diversity");
  analyze->add_option("--n-shot", analyze_n, "contexts per query");
  for (auto* sub : {gen, cluster, pool, train, select, analyze}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Config config = config_path.empty() ? Config{} : Config::load(config_path);
    config.apply_env(env);
    for (const auto& a : assignments) config.apply_assignment(a);
    if (seed) config.set("run.seed", std::to_string(*seed));
    if (!out_dir.empty()) config.set("run.out", out_dir);
    if (!query_list.empty()) config.set("select.queries", query_list);
    if (select_n) config.set("select.n_shot", std::to_string(*select_n));
    if (!protocol.empty()) config.set("analyze.protocol", protocol);
    if (analyze_n) config.set("analyze.n_shot", std::to_string(*analyze_n));
    const auto cfg = resolve(config);

    if (*gen) cmd_gen_synth(cfg, out);
    if (*cluster) cmd_cluster(cfg, out);
    if (*pool) cmd_build_pool(cfg, out);
    if (*train) cmd_train(cfg, out);
    if (*select) cmd_select(cfg, out);
    if (*analyze) cmd_analyze(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace scs::cli
