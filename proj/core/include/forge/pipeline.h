// Copyright 2026 The Forge Authors
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

// The labeling workflow as resumable stages:
//
//   ingest -> c0 -> r1 -> c1 -> r2 -> c2 -> r3 -> c3 -> validation
//          -> c4 -> r4 -> c5 -> accounts -> export
//
// Each stage writes its artifact to <work_dir>/artifacts/<stage>.json and a
// manifest with the hash of its inputs (config, upstream outputs and the
// annotations it reads) to <work_dir>/manifests/<stage>.json. Rerunning a
// stage whose inputs are unchanged is a no-op.

#ifndef FORGE_PIPELINE_H_
#define FORGE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/lexicon.h"
#include "forge/model.h"
#include "forge/normalize.h"
#include "forge/simulation.h"
#include "forge/store.h"

namespace forge {

// `key = value` lines; `#` starts a comment line. Unknown keys are errors so
// typos do not silently fall back to defaults.
struct PipelineConfig {
  std::filesystem::path work_dir;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string input;  // tweets JSON-lines, unless simulating
  bool simulate = false;

  std::string slang_file, c0_rules_file, c4_rules_file, hashtags_file;  // empty = built-in
  int min_tokens = 5;
  int max_n = 3;
  int min_df = 1;

  int annotators = 5;   // valid workers per HIT
  int unanimity = 5;    // agreeing votes for a training label
  int majority = 3;     // agreeing votes for a validation reference label
  std::size_t subset_size = 40;
  std::size_t n_dups = 5;

  std::size_t r1_size = 400;
  std::size_t r2_type1 = 240;
  std::size_t r2_type2 = 160;
  double r2_percentile = 0.8;
  double r2_band_fraction = 0.1;
  std::size_t validation_per_model = 400;
  std::size_t r4_size = 200;

  int cv_k = 10;
  std::vector<double> grid_c = {0.1, 1.0, 10.0};
  std::vector<double> grid_pos = {1, 2, 3, 5, 8};
  std::vector<double> grid_neg = {1};
  int svm_epochs = 2000;
  double svm_tolerance = 1e-4;

  std::vector<std::string> experts = {"expert1", "expert2"};

  SyntheticConfig synthetic;
  double sim_accuracy = 0.9;
  double sim_careless_rate = 0.1;
  std::size_t sim_pool_size = 40;
  double sim_expert_accuracy = 0.95;

  // Throws ParseError for malformed lines and unknown keys.
  static PipelineConfig parse(std::istream& in);
  static PipelineConfig load(const std::string& path);
  // Throws InvalidArgument for missing or out-of-range settings.
  void validate() const;
  // Canonical `key=value` listing of every setting; hashed into manifests.
  std::string canonical() const;

  std::vector<GridCell> grid() const;
  TrainConfig train_base() const;
};

const std::vector<std::string>& stage_order();
const std::vector<std::string>& stage_prerequisites(const std::string& stage);

struct StageReport {
  std::string stage;
  bool up_to_date = false;
  nlohmann::json artifact;
};

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg);
  ~Pipeline();

  // Throws DependencyError naming the missing prerequisite, InvalidArgument
  // for an unknown stage, and ConflictError when a finished stage is rerun
  // with different inputs (its store writes cannot be undone).
  StageReport run_stage(const std::string& stage);

  // Every stage in order, then the final report.
  nlohmann::json run_all(const std::function<void(const StageReport&)>& progress = {});

  // Built from the artifacts of a completed run and written to
  // <work_dir>/report.json. Throws DependencyError before export has run.
  nlohmann::json report();

  bool completed(const std::string& stage) const;
  Store& store() { return *store_; }
  const PipelineConfig& config() const { return cfg_; }

 private:
  struct Cache;

  std::filesystem::path artifact_path(const std::string& stage) const;
  std::filesystem::path manifest_path(const std::string& stage) const;
  std::filesystem::path model_path(const std::string& name) const;
  nlohmann::json artifact(const std::string& stage) const;
  std::string extra_inputs(const std::string& stage) const;

  nlohmann::json stage_ingest();
  nlohmann::json stage_c0();
  nlohmann::json stage_r1();
  nlohmann::json stage_c1();
  nlohmann::json stage_r2();
  nlohmann::json stage_c2();
  nlohmann::json stage_r3();
  nlohmann::json stage_c3();
  nlohmann::json stage_validation();
  nlohmann::json stage_c4();
  nlohmann::json stage_r4();
  nlohmann::json stage_c5();
  nlohmann::json stage_accounts();
  nlohmann::json stage_export();

  // Consumes ids, builds and stores the round's HITs, and simulates the
  // crowd when configured.
  nlohmann::json publish_round(const std::string& round_id, const std::vector<std::string>& ids);
  AggregateResult aggregate_round(const std::string& round_id) const;
  std::vector<AggregatedLabel> unanimous(const AggregateResult& r) const;
  std::map<std::string, Label> references(const std::string& round_id) const;
  AdjudicationBook adjudication_book() const;
  nlohmann::json train_labeler(const std::string& name,
                               const std::vector<std::pair<std::string, Label>>& rows);
  // Model labels for every tweet of the corpus; "c0" is the rule filter.
  const std::map<std::string, Label>& corpus_predictions(const std::string& model);
  std::map<std::string, Label> gold_labels(bool with_r4) const;
  const std::vector<Tweet>& tweets();

  const SlangDictionary& slang();
  const NormalizedDoc& doc(const std::string& tweet_id);
  const GroundTruth& truth();
  const LinearModel& model(const std::string& name);
  AnnotatorPool pool() const;

  PipelineConfig cfg_;
  std::unique_ptr<Store> store_;
  std::unique_ptr<Cache> cache_;
};

// Exit status for the CLI: 0 ok, 2 dependency error, 3 validation failure
// (bad config, input or conflicting rerun), 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace forge

#endif  // FORGE_PIPELINE_H_
