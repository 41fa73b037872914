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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "scs/agent.hpp"
#include "scs/clustering.hpp"
#include "scs/error.hpp"
#include "scs/features.hpp"
#include "scs/oracle.hpp"
#include "scs/training.hpp"
#include "scs_cli/config.hpp"

namespace scs::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitOracle = 3,
};

int exit_code_for(ErrorCode code) noexcept;

struct OracleSettings {
  std::string mode = "class_match";  // class_match | cosine_sigmoid | matrix | remote
  std::filesystem::path labels;
  std::filesystem::path matrix;
  std::string endpoint;
  std::uint64_t timeout_ms = 30000;
  std::uint64_t max_retries = 3;
  std::uint64_t max_in_flight = 4;
  SimulatedOracleConfig simulated;
  std::filesystem::path cache;  // optional memo sidecar
};

/// Fully resolved settings for one invocation. Every random choice derives
/// from `seed` through named substreams.
struct PipelineConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  std::filesystem::path train_features;
  std::filesystem::path query_features;
  bool normalize = true;

  SyntheticWorldConfig synth;
  KMeansConfig kmeans;
  AgentConfig agent;
  TrainConfig train;
  bool checkpoint_every_epoch = false;
  OracleSettings oracle;

  std::vector<std::string> select_queries;
  std::size_t select_n_shot = 1;

  std::string protocol = "similarity";
  std::size_t analyze_n_shot = 1;
  std::vector<std::uint64_t> analyze_seeds;
  bool exclude_self = true;
};

PipelineConfig resolve(const Config& config);

// Output file names inside out_dir.
inline constexpr const char* kSynthFeaturesFile = "features.scsf";
inline constexpr const char* kSynthLabelsFile = "labels.csv";
inline constexpr const char* kModelFile = "kmeans.model";
inline constexpr const char* kClusterSizesFile = "cluster_sizes.csv";
inline constexpr const char* kManifestFile = "manifest.csv";
inline constexpr const char* kPoolFeaturesFile = "pool.scsf";
inline constexpr const char* kCheckpointFile = "agent.scsa";
inline constexpr const char* kTrainReportFile = "train_report.csv";
inline constexpr const char* kSelectionFile = "selection.csv";

FeatureSet load_pipeline_features(const std::filesystem::path& path, bool normalize);
std::map<std::string, int> load_labels(const std::filesystem::path& path);
void save_labels(const std::map<std::string, int>& labels, const std::filesystem::path& path);

/// Builds the configured oracle. Feature-backed modes look vectors up in
/// `feature_sets`.
std::shared_ptr<const Oracle> make_oracle(const OracleSettings& settings,
                                          std::span<const FeatureSet> feature_sets);

// Each command throws scs::Error on failure and writes progress to `log`.
void cmd_gen_synth(const PipelineConfig& cfg, std::ostream& log);
void cmd_cluster(const PipelineConfig& cfg, std::ostream& log);
void cmd_build_pool(const PipelineConfig& cfg, std::ostream& log);
void cmd_train(const PipelineConfig& cfg, std::ostream& log);
void cmd_select(const PipelineConfig& cfg, std::ostream& log);
void cmd_analyze(const PipelineConfig& cfg, std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv, char** env, std::ostream& out, std::ostream& err);

}  // namespace scs::cli
