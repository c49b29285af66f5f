// Copyright 2026 The OriginRank Authors.
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

#ifndef ORIGINRANK_PIPELINE_H_
#define ORIGINRANK_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "originrank/corpus.h"
#include "originrank/features.h"
#include "originrank/kernels.h"
#include "originrank/metrics.h"
#include "originrank/projection.h"
#include "originrank/rank_svm.h"
#include "originrank/selection.h"
#include "originrank/simulator.h"
#include "originrank/vae.h"

namespace originrank {

struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path work_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  SimConfig simulate;
  FeatureConfig features;
  VaeHyperParams vae;
  VaeTrainConfig pretrain;
  VaeTrainConfig finetune;
  RankTrainConfig rank;
  std::size_t max_ordered = 20000;
  std::size_t max_similar = 5000;
  SelectionPolicy selection;
  double extremes_fraction = 0.1;
  int histogram_bins = 20;
  TsneConfig tsne;

  // Canonical JSON form; its hash identifies a run.
  std::string canonical_json() const;
  std::string hash() const;
};

// Offsets added to the global seed for each randomized stage.
struct StageSeeds {
  std::uint64_t simulate;
  std::uint64_t pretrain;
  std::uint64_t finetune;
  std::uint64_t pairs;
  std::uint64_t rank;
  std::uint64_t tsne;
};
StageSeeds stage_seeds(std::uint64_t global_seed);

// Sets the global seed and the per-stage seeds derived from it.
void set_seed(PipelineConfig& config, std::uint64_t seed);

PipelineConfig default_pipeline_config();
// Relative paths resolve against base_dir. Unknown keys are config errors.
PipelineConfig parse_pipeline_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Utterance-level data held in memory by the in-process workflow.
struct Dataset {
  std::vector<UtteranceRecord> records;
  std::vector<FrameFeatures> features;
  std::vector<std::optional<FrameFeatures>> base_features;
  RowMatrix pooled;

  std::vector<Label> labels() const;
  std::vector<std::string> ids() const;
  RowMatrix rows_with(Label label) const;
};

Dataset dataset_from_simulation(const std::vector<SimulatedUtterance>& utterances,
                                const FeatureConfig& config, bool with_bases,
                                Exec exec = Exec::kParallel);
// Extracts base-signal features for the listed ids only.
void attach_base_features(Dataset& data, const std::vector<SimulatedUtterance>& utterances,
                          std::span<const std::string> ids, const FeatureConfig& config,
                          Exec exec = Exec::kParallel);
Dataset dataset_from_corpus(const CorpusIndex& index, const FeatureConfig& config,
                            bool with_bases, Exec exec = Exec::kParallel);

struct TrainedModels {
  VaeTrainResult pretrain;
  VaeTrainResult finetune;
  RowMatrix latents;  // mu ++ logvar from the fine-tuned model
  PairSet pairs;
  RankModel rank;     // with bounds fitted on the dataset
  double train_accuracy = 0.0;
};

TrainedModels train_models(const Dataset& data, const PipelineConfig& config);

std::vector<ScoredUtterance> score_dataset(const Dataset& data, const RowMatrix& latents,
                                           const RankModel& model);

struct ExtremeAnalysis {
  std::vector<ScoredUtterance> high;
  std::vector<ScoredUtterance> low;
  MetricReport high_report;
  MetricReport low_report;
};

// Distortions of the highest- and lowest-originality synthetic items against
// their base signals.
ExtremeAnalysis analyze_extremes(const Dataset& data,
                                 const std::vector<ScoredUtterance>& scores, double fraction);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// Names of the files a full run writes into the work directory.
const std::vector<std::string>& core_artifacts();

using Json = nlohmann::ordered_json;

// File-based stages; each reads its inputs from and writes its outputs to
// config.work_dir, returning a fragment for the run summary.
Json stage_simulate(const PipelineConfig& config, const std::filesystem::path& out_dir);
Json stage_extract(const PipelineConfig& config);
Json stage_train_vae(const PipelineConfig& config);
Json stage_finetune_vae(const PipelineConfig& config);
Json stage_encode(const PipelineConfig& config);
Json stage_train_rank(const PipelineConfig& config);
Json stage_score(const PipelineConfig& config);
Json stage_select(const PipelineConfig& config);
Json stage_metrics(const PipelineConfig& config);
Json stage_histogram(const PipelineConfig& config);
Json stage_project(const PipelineConfig& config);

// All stages in order, then summary.json. Returns the summary text.
std::string run_pipeline(const PipelineConfig& config);

}  // namespace originrank

#endif  // ORIGINRANK_PIPELINE_H_
