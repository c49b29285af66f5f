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

#include "originrank/pipeline.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "originrank/error.h"
#include "originrank/histogram.h"
#include "originrank/io_util.h"
#include "originrank/plot_svg.h"
#include "originrank/wav.h"

namespace originrank {

namespace {

constexpr const char* kConfigVersion = "cfg-1";
constexpr const char* kSummaryVersion = "summary-1";

constexpr const char* kPooledFile = "pooled.jsonl";
constexpr const char* kPretrainFile = "vae_pretrain.json";
constexpr const char* kVaeFile = "vae_model.json";
constexpr const char* kLatentFile = "latents.jsonl";
constexpr const char* kRankFile = "rank_model.json";
constexpr const char* kScoresFile = "scores.csv";
constexpr const char* kSelectionFile = "selection.csv";
constexpr const char* kSelectionSidecar = "selection.json";
constexpr const char* kMetricsFile = "metrics.csv";
constexpr const char* kMetricsTable = "metrics.txt";
constexpr const char* kHistogramFile = "histogram.csv";
constexpr const char* kHistogramSvg = "histogram.svg";
constexpr const char* kProjectionFile = "projection.csv";
constexpr const char* kPcaSvg = "projection_pca.svg";
constexpr const char* kTsneSvg = "projection_tsne.svg";
constexpr const char* kSummaryFile = "summary.json";

// Reads one JSON object, remembering which keys were consumed so unknown
// keys can be reported.
class Section {
 public:
  Section(const Json& json, std::string path) : json_(json), path_(std::move(path)) {
    require(json_.is_object(), Errc::kInvalidConfig, where() + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!json_.contains(key)) return;
    try {
      out = json_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error(Errc::kInvalidConfig, "bad type for " + where(key));
    }
  }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    if (!json_.contains(key)) return std::nullopt;
    return Section(json_.at(key), path_.empty() ? key : path_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, value] : json_.items()) {
      if (!seen_.count(key)) throw Error(Errc::kInvalidConfig, "unknown key " + where(key.c_str()));
    }
  }

 private:
  std::string where(const char* key = nullptr) const {
    std::string p = path_;
    if (key != nullptr) p = p.empty() ? key : p + "." + key;
    return "'" + (p.empty() ? std::string("<root>") : p) + "'";
  }

  const Json& json_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_train_config(Section& s, VaeTrainConfig& c) {
  s.get("epochs", c.epochs);
  s.get("batch_size", c.batch_size);
  s.get("learning_rate", c.learning_rate);
  s.get("beta", c.beta);
  std::string opt(optimizer_name(c.optimizer));
  s.get("optimizer", opt);
  c.optimizer = parse_optimizer(opt);
  s.finish();
}

Json train_config_json(const VaeTrainConfig& c) {
  Json j;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["beta"] = c.beta;
  j["optimizer"] = std::string(optimizer_name(c.optimizer));
  return j;
}

std::string selection_mode_name(SelectionPolicy::Mode mode) {
  switch (mode) {
    case SelectionPolicy::Mode::kTopK:
      return "top_k";
    case SelectionPolicy::Mode::kTopFraction:
      return "top_fraction";
    default:
      return "threshold";
  }
}

std::filesystem::path artifact(const PipelineConfig& c, const char* name) {
  return c.work_dir / name;
}

std::string file_hash(const std::filesystem::path& path) { return hash_hex(read_text_file(path)); }

// Model files carry the hash of the configuration that produced them.
void write_tagged_json(const std::filesystem::path& path, const std::string& json_text,
                       const PipelineConfig& config) {
  Json j = Json::parse(json_text);
  j["config_hash"] = config.hash();
  write_text_file(path, j.dump(1) + "\n");
}

Json rows_json(const RowMatrix& m, Eigen::Index r) {
  return Json(std::vector<double>(m.data() + r * m.cols(), m.data() + (r + 1) * m.cols()));
}

void write_pooled(const std::filesystem::path& path, const std::vector<std::string>& ids,
                  const RowMatrix& pooled) {
  std::string text;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Json j;
    j["id"] = ids[i];
    j["vec"] = rows_json(pooled, static_cast<Eigen::Index>(i));
    text += j.dump() + "\n";
  }
  write_text_file(path, text);
}

// Parses JSONL rows of numeric arrays stored under `keys` (concatenated), in
// manifest order.
RowMatrix read_rows(const std::filesystem::path& path, const CorpusIndex& index,
                    std::initializer_list<const char*> keys) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.filename().string() + " line " + std::to_string(line_no);
    try {
      const Json j = Json::parse(line);
      const std::size_t r = rows.size();
      require(r < index.records.size() && j.at("id") == index.records[r].id, Errc::kParseError,
              where + ": ids do not follow the manifest order");
      std::vector<double> row;
      for (const char* key : keys) {
        const auto part = j.at(key).get<std::vector<double>>();
        row.insert(row.end(), part.begin(), part.end());
      }
      require(rows.empty() || row.size() == rows.front().size(), Errc::kParseError,
              where + ": inconsistent vector length");
      rows.push_back(std::move(row));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kParseError, where + ": " + e.what());
    }
  }
  require(rows.size() == index.records.size(), Errc::kParseError,
          path.filename().string() + " does not cover every manifest record");
  require(!rows.empty(), Errc::kParseError, path.filename().string() + " is empty");
  RowMatrix m(static_cast<Eigen::Index>(rows.size()),
              static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(rows[r].begin(), rows[r].end(), m.data() + static_cast<Eigen::Index>(r) * m.cols());
  }
  return m;
}

std::vector<Label> labels_of(const CorpusIndex& index) {
  std::vector<Label> out;
  for (const auto& r : index.records) out.push_back(r.label);
  return out;
}

RowMatrix select_rows(const RowMatrix& m, std::span<const Label> labels, Label want) {
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == want) keep.push_back(static_cast<Eigen::Index>(i));
  }
  RowMatrix out(static_cast<Eigen::Index>(keep.size()), m.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(keep[i]);
  return out;
}

RowMatrix stack_pooled(const std::vector<PooledVector>& pooled) {
  if (pooled.empty()) return {};
  RowMatrix m(static_cast<Eigen::Index>(pooled.size()),
              static_cast<Eigen::Index>(pooled.front().values.size()));
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    std::copy(pooled[i].values.begin(), pooled[i].values.end(),
              m.data() + static_cast<Eigen::Index>(i) * m.cols());
  }
  return m;
}

Json interval_json(const Interval& iv) {
  Json j;
  j["mean"] = iv.mean;
  j["ci_half_width"] = iv.half_width;
  j["n"] = iv.n;
  return j;
}

Json report_json(const MetricReport& r) {
  Json j;
  j["n_utterances"] = r.n_utterances;
  j["f0_rmse_hz"] = interval_json(r.f0_rmse_hz);
  j["lsd_db"] = interval_json(r.lsd_db);
  j["gain_rmse_db"] = interval_json(r.gain_rmse_db);
  j["vuv_error_pct"] = interval_json(r.vuv_error_pct);
  return j;
}

Exec exec_for(const PipelineConfig& c) {
  set_num_threads(c.threads);
  return Exec::kParallel;
}

template <typename Fn>
auto run_stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "stage '" + std::string(name) + "': " + e.message());
  } catch (const std::exception& e) {
    throw Error(Errc::kIoError, "stage '" + std::string(name) + "': " + e.what());
  }
}

}  // namespace

StageSeeds stage_seeds(std::uint64_t g) {
  return {g, g + 1009, g + 2003, g + 3001, g + 4001, g + 5003};
}

void set_seed(PipelineConfig& c, std::uint64_t seed) {
  c.seed = seed;
  const StageSeeds s = stage_seeds(seed);
  c.pretrain.seed = s.pretrain;
  c.finetune.seed = s.finetune;
  c.rank.seed = s.rank;
  c.tsne.seed = s.tsne;
}

PipelineConfig default_pipeline_config() {
  PipelineConfig c;
  c.pretrain.epochs = 150;
  c.finetune.epochs = 60;
  set_seed(c, c.seed);
  return c;
}

std::string PipelineConfig::canonical_json() const {
  Json j;
  j["version"] = kConfigVersion;
  j["seed"] = seed;
  Json sim;
  sim["n_recorded"] = simulate.n_recorded;
  sim["n_synthetic"] = simulate.n_synthetic;
  sim["duration_min"] = simulate.duration_min;
  sim["duration_max"] = simulate.duration_max;
  sim["sample_rate"] = simulate.sample_rate;
  sim["f0_min"] = simulate.f0_min;
  sim["f0_max"] = simulate.f0_max;
  sim["severity_min"] = simulate.severity_min;
  sim["severity_max"] = simulate.severity_max;
  j["simulate"] = sim;
  Json f;
  f["frame_hop"] = features.frame_hop;
  f["frame_len"] = features.frame_len;
  f["fft_size"] = features.fft_size;
  f["n_mel"] = features.n_mel;
  f["f0_min"] = features.f0_min;
  f["f0_max"] = features.f0_max;
  f["nacf_voicing_threshold"] = features.nacf_voicing_threshold;
  f["energy_gate_db"] = features.energy_gate_db;
  f["mag_floor"] = features.mag_floor;
  j["features"] = f;
  Json v;
  v["latent_dim"] = vae.latent_dim;
  v["hidden_dim"] = vae.hidden_dim;
  v["pretrain"] = train_config_json(pretrain);
  v["finetune"] = train_config_json(finetune);
  j["vae"] = v;
  Json r;
  r["lambda"] = rank.lambda;
  r["mu_s"] = rank.mu_s;
  r["iterations"] = rank.iterations;
  r["batch_pairs"] = rank.batch_pairs;
  r["projection"] = rank.projection;
  r["tail_average"] = rank.tail_average;
  r["max_ordered"] = max_ordered;
  r["max_similar"] = max_similar;
  j["rank"] = r;
  Json sel;
  sel["mode"] = selection_mode_name(selection.mode);
  sel["k"] = selection.k;
  sel["fraction"] = selection.fraction;
  sel["threshold"] = selection.threshold;
  j["selection"] = sel;
  j["extremes_fraction"] = extremes_fraction;
  j["histogram"] = Json{{"bins", histogram_bins}};
  Json t;
  t["perplexity"] = tsne.perplexity;
  t["iterations"] = tsne.iterations;
  t["learning_rate"] = tsne.learning_rate;
  t["early_exaggeration"] = tsne.early_exaggeration;
  t["exaggeration_iters"] = tsne.exaggeration_iters;
  t["momentum_switch_iter"] = tsne.momentum_switch_iter;
  j["tsne"] = t;
  return j.dump();
}

std::string PipelineConfig::hash() const { return hash_hex(canonical_json()); }

PipelineConfig parse_pipeline_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  PipelineConfig c = default_pipeline_config();
  Section s(root, "");
  std::string version;
  s.get("version", version);
  require(version == kConfigVersion, Errc::kInvalidConfig,
          "config version must be \"" + std::string(kConfigVersion) + "\"");
  s.get("seed", c.seed);
  s.get("threads", c.threads);
  if (auto p = s.child("paths")) {
    std::string manifest;
    std::string work_dir;
    p->get("manifest", manifest);
    p->get("work_dir", work_dir);
    p->finish();
    if (!manifest.empty()) c.manifest = base_dir / manifest;
    if (!work_dir.empty()) c.work_dir = base_dir / work_dir;
  }
  if (auto p = s.child("simulate")) {
    p->get("n_recorded", c.simulate.n_recorded);
    p->get("n_synthetic", c.simulate.n_synthetic);
    p->get("duration_min", c.simulate.duration_min);
    p->get("duration_max", c.simulate.duration_max);
    p->get("sample_rate", c.simulate.sample_rate);
    p->get("f0_min", c.simulate.f0_min);
    p->get("f0_max", c.simulate.f0_max);
    p->get("severity_min", c.simulate.severity_min);
    p->get("severity_max", c.simulate.severity_max);
    p->finish();
  }
  if (auto p = s.child("features")) {
    p->get("frame_hop", c.features.frame_hop);
    p->get("frame_len", c.features.frame_len);
    p->get("fft_size", c.features.fft_size);
    p->get("n_mel", c.features.n_mel);
    p->get("f0_min", c.features.f0_min);
    p->get("f0_max", c.features.f0_max);
    p->get("nacf_voicing_threshold", c.features.nacf_voicing_threshold);
    p->get("energy_gate_db", c.features.energy_gate_db);
    p->get("mag_floor", c.features.mag_floor);
    p->finish();
  }
  if (auto p = s.child("vae")) {
    p->get("latent_dim", c.vae.latent_dim);
    p->get("hidden_dim", c.vae.hidden_dim);
    if (auto t = p->child("pretrain")) read_train_config(*t, c.pretrain);
    if (auto t = p->child("finetune")) read_train_config(*t, c.finetune);
    p->finish();
  }
  if (auto p = s.child("rank")) {
    p->get("lambda", c.rank.lambda);
    p->get("mu_s", c.rank.mu_s);
    p->get("iterations", c.rank.iterations);
    p->get("batch_pairs", c.rank.batch_pairs);
    p->get("projection", c.rank.projection);
    p->get("tail_average", c.rank.tail_average);
    p->get("max_ordered", c.max_ordered);
    p->get("max_similar", c.max_similar);
    p->finish();
  }
  if (auto p = s.child("selection")) {
    std::string mode = selection_mode_name(c.selection.mode);
    p->get("mode", mode);
    p->get("k", c.selection.k);
    p->get("fraction", c.selection.fraction);
    p->get("threshold", c.selection.threshold);
    p->finish();
    if (mode == "top_k") {
      c.selection.mode = SelectionPolicy::Mode::kTopK;
    } else if (mode == "top_fraction") {
      c.selection.mode = SelectionPolicy::Mode::kTopFraction;
    } else if (mode == "threshold") {
      c.selection.mode = SelectionPolicy::Mode::kThreshold;
    } else {
      throw Error(Errc::kInvalidConfig, "unknown selection mode '" + mode + "'");
    }
  }
  s.get("extremes_fraction", c.extremes_fraction);
  if (auto p = s.child("histogram")) {
    p->get("bins", c.histogram_bins);
    p->finish();
  }
  if (auto p = s.child("tsne")) {
    p->get("perplexity", c.tsne.perplexity);
    p->get("iterations", c.tsne.iterations);
    p->get("learning_rate", c.tsne.learning_rate);
    p->get("early_exaggeration", c.tsne.early_exaggeration);
    p->get("exaggeration_iters", c.tsne.exaggeration_iters);
    p->get("momentum_switch_iter", c.tsne.momentum_switch_iter);
    p->finish();
  }
  s.finish();

  set_seed(c, c.seed);
  c.vae.beta = c.pretrain.beta;

  c.simulate.validate();
  c.pretrain.validate();
  c.finetune.validate();
  c.rank.validate();
  c.selection.validate();
  c.tsne.validate();
  require(c.vae.latent_dim >= 1 && c.vae.hidden_dim >= 1, Errc::kInvalidConfig,
          "VAE dimensions must be positive");
  require(c.histogram_bins >= 2, Errc::kInvalidConfig, "histogram bins must be >= 2");
  require(c.extremes_fraction > 0.0 && c.extremes_fraction <= 0.5, Errc::kInvalidConfig,
          "extremes_fraction must lie in (0, 0.5]");
  require(c.max_ordered >= 1, Errc::kInvalidConfig, "max_ordered must be >= 1");
  require(c.threads >= 0, Errc::kInvalidConfig, "threads must be >= 0");
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw Error(Errc::kInvalidConfig, "cannot read config: " + e.message());
  }
  return parse_pipeline_config(text, path.parent_path());
}

std::vector<Label> Dataset::labels() const {
  std::vector<Label> out;
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  for (const auto& r : records) out.push_back(r.id);
  return out;
}

RowMatrix Dataset::rows_with(Label label) const {
  const std::vector<Label> l = labels();
  return select_rows(pooled, l, label);
}

Dataset dataset_from_simulation(const std::vector<SimulatedUtterance>& utterances,
                                const FeatureConfig& config, bool with_bases, Exec exec) {
  Dataset d;
  std::vector<Waveform> waves;
  std::vector<Waveform> bases;
  std::vector<std::size_t> base_owner;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    d.records.push_back(utterances[i].record);
    waves.push_back(utterances[i].waveform);
    if (with_bases && utterances[i].base_waveform) {
      bases.push_back(*utterances[i].base_waveform);
      base_owner.push_back(i);
    }
  }
  d.features = extract_batch(waves, config, exec);
  d.base_features.resize(utterances.size());
  std::vector<FrameFeatures> bf = extract_batch(bases, config, exec);
  for (std::size_t k = 0; k < bf.size(); ++k) d.base_features[base_owner[k]] = std::move(bf[k]);
  d.pooled = stack_pooled(pool_batch(d.features, exec));
  return d;
}

void attach_base_features(Dataset& data, const std::vector<SimulatedUtterance>& utterances,
                          std::span<const std::string> ids, const FeatureConfig& config,
                          Exec exec) {
  require(utterances.size() == data.records.size(), Errc::kDimMismatch,
          "utterances do not match the dataset");
  data.base_features.resize(data.records.size());
  std::vector<Waveform> bases;
  std::vector<std::size_t> owner;
  for (const auto& id : ids) {
    std::size_t i = 0;
    while (i < utterances.size() && utterances[i].record.id != id) ++i;
    require(i < utterances.size(), Errc::kNotFound, "id " + id + " not in dataset");
    require(utterances[i].base_waveform.has_value(), Errc::kMissingFile,
            "synthetic item " + id + " has no base signal");
    bases.push_back(*utterances[i].base_waveform);
    owner.push_back(i);
  }
  std::vector<FrameFeatures> bf = extract_batch(bases, config, exec);
  for (std::size_t k = 0; k < bf.size(); ++k) data.base_features[owner[k]] = std::move(bf[k]);
}

Dataset dataset_from_corpus(const CorpusIndex& index, const FeatureConfig& config,
                            bool with_bases, Exec exec) {
  Dataset d;
  d.records = index.records;
  const std::size_t n = index.records.size();
  std::vector<Waveform> waves(n);
  parallel_for(n, exec, [&](std::size_t i) { waves[i] = load_wav(index.resolve(index.records[i].path)); });
  d.features = extract_batch(waves, config, exec);
  d.base_features.resize(n);
  if (with_bases) {
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < n; ++i) {
      if (index.records[i].base_path) owner.push_back(i);
    }
    std::vector<Waveform> bases(owner.size());
    parallel_for(owner.size(), exec, [&](std::size_t k) {
      bases[k] = load_wav(index.resolve(*index.records[owner[k]].base_path));
    });
    std::vector<FrameFeatures> bf = extract_batch(bases, config, exec);
    for (std::size_t k = 0; k < owner.size(); ++k) d.base_features[owner[k]] = std::move(bf[k]);
  }
  d.pooled = stack_pooled(pool_batch(d.features, exec));
  return d;
}

TrainedModels train_models(const Dataset& data, const PipelineConfig& config) {
  TrainedModels t;
  const RowMatrix rec = data.rows_with(Label::kRecorded);
  const RowMatrix syn = data.rows_with(Label::kSynthetic);
  t.pretrain = train_vae(rec, config.vae, config.pretrain);
  t.finetune = finetune_vae(t.pretrain.model, rec, syn, config.finetune);
  t.latents = latent_batch(t.finetune.model, data.pooled);
  const std::vector<Label> labels = data.labels();
  t.pairs = build_pairs(t.latents, labels, config.max_ordered, config.max_similar,
                        stage_seeds(config.seed).pairs);
  t.rank = train_sgd(t.pairs, config.rank);
  t.rank = normalize_fit(t.rank, score_rows(t.rank, t.latents));
  t.train_accuracy = pairwise_accuracy(t.rank, t.pairs);
  return t;
}

std::vector<ScoredUtterance> score_dataset(const Dataset& data, const RowMatrix& latents,
                                           const RankModel& model) {
  const std::vector<double> raw = score_rows(model, latents);
  std::vector<ScoredUtterance> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.push_back({data.records[i].id, data.records[i].label, raw[i],
                   originality_of_score(model, raw[i])});
  }
  return out;
}

ExtremeAnalysis analyze_extremes(const Dataset& data, const std::vector<ScoredUtterance>& scores,
                                 double fraction) {
  std::vector<ScoredUtterance> synthetic;
  for (const auto& s : scores) {
    if (s.label == Label::kSynthetic) synthetic.push_back(s);
  }
  ExtremeAnalysis out;
  std::tie(out.high, out.low) = split_extremes(synthetic, fraction);
  auto metrics_for = [&](const std::vector<ScoredUtterance>& group) {
    std::vector<PairMetrics> m;
    for (const auto& s : group) {
      std::size_t idx = CorpusIndex::npos;
      for (std::size_t i = 0; i < data.records.size(); ++i) {
        if (data.records[i].id == s.id) {
          idx = i;
          break;
        }
      }
      require(idx != CorpusIndex::npos, Errc::kNotFound, "scored id " + s.id + " not in dataset");
      require(data.base_features[idx].has_value(), Errc::kMissingFile,
              "synthetic item " + s.id + " has no base signal for distortion metrics");
      m.push_back(pair_metrics(data.features[idx], *data.base_features[idx]));
    }
    return m;
  };
  const std::vector<PairMetrics> high = metrics_for(out.high);
  const std::vector<PairMetrics> low = metrics_for(out.low);
  std::tie(out.high_report, out.low_report) = group_report(high, low);
  return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), Errc::kLengthMismatch, "spearman inputs differ in length");
  require(x.size() >= 2, Errc::kTooFew, "spearman needs at least 2 points");
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> rx = ranks(x);
  const std::vector<double> ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  require(sxx > 0.0 && syy > 0.0, Errc::kDegenerateData, "spearman input is constant");
  return sxy / std::sqrt(sxx * syy);
}

const std::vector<std::string>& core_artifacts() {
  static const std::vector<std::string> names = {kPooledFile,   kVaeFile,       kRankFile,
                                                 kScoresFile,   kSelectionFile, kMetricsFile,
                                                 kHistogramFile, kProjectionFile};
  return names;
}

Json stage_simulate(const PipelineConfig& config, const std::filesystem::path& out_dir) {
  const CorpusIndex index = simulate_corpus(config.simulate, stage_seeds(config.seed).simulate, out_dir);
  Json j;
  j["recorded"] = index.count(Label::kRecorded);
  j["synthetic"] = index.count(Label::kSynthetic);
  j["manifest_hash"] = file_hash(out_dir / "manifest.jsonl");
  return j;
}

Json stage_extract(const PipelineConfig& config) {
  const Exec exec = exec_for(config);
  const CorpusIndex index = scan_corpus(config.manifest);
  const Dataset d = dataset_from_corpus(index, config.features, false, exec);
  write_pooled(artifact(config, kPooledFile), d.ids(), d.pooled);
  std::size_t frames = 0;
  for (const auto& f : d.features) frames += f.frames();
  Json j;
  j["utterances"] = d.records.size();
  j["frames"] = frames;
  j["pooled_dim"] = d.pooled.cols();
  return j;
}

Json stage_train_vae(const PipelineConfig& config) {
  exec_for(config);
  const CorpusIndex index = scan_corpus(config.manifest);
  const RowMatrix pooled = read_rows(artifact(config, kPooledFile), index, {"vec"});
  const std::vector<Label> labels = labels_of(index);
  const VaeTrainResult r =
      train_vae(select_rows(pooled, labels, Label::kRecorded), config.vae, config.pretrain);
  write_tagged_json(artifact(config, kPretrainFile), vae_to_json(r.model), config);
  Json j;
  j["epochs"] = r.epoch_loss.size();
  j["final_loss"] = r.epoch_loss.back().loss;
  j["final_recon"] = r.epoch_loss.back().recon;
  j["final_kl"] = r.epoch_loss.back().kl;
  return j;
}

Json stage_finetune_vae(const PipelineConfig& config) {
  exec_for(config);
  const CorpusIndex index = scan_corpus(config.manifest);
  const RowMatrix pooled = read_rows(artifact(config, kPooledFile), index, {"vec"});
  const std::vector<Label> labels = labels_of(index);
  const VaeModel pre = load_vae(artifact(config, kPretrainFile));
  const VaeTrainResult r =
      finetune_vae(pre, select_rows(pooled, labels, Label::kRecorded),
                   select_rows(pooled, labels, Label::kSynthetic), config.finetune);
  write_tagged_json(artifact(config, kVaeFile), vae_to_json(r.model), config);
  Json j;
  j["epochs"] = r.epoch_loss.size();
  j["final_loss"] = r.epoch_loss.back().loss;
  j["final_recon"] = r.epoch_loss.back().recon;
  j["final_kl"] = r.epoch_loss.back().kl;
  return j;
}

Json stage_encode(const PipelineConfig& config) {
  const Exec exec = exec_for(config);
  const CorpusIndex index = scan_corpus(config.manifest);
  const RowMatrix pooled = read_rows(artifact(config, kPooledFile), index, {"vec"});
  const VaeModel model = load_vae(artifact(config, kVaeFile));
  const RowMatrix latents = latent_batch(model, pooled, exec);
  const Eigen::Index dz = model.hyper.latent_dim;
  std::string text;
  for (std::size_t i = 0; i < index.records.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double* row = latents.data() + r * latents.cols();
    Json j;
    j["id"] = index.records[i].id;
    j["mu"] = std::vector<double>(row, row + dz);
    j["logvar"] = std::vector<double>(row + dz, row + 2 * dz);
    text += j.dump() + "\n";
  }
  write_text_file(artifact(config, kLatentFile), text);
  Json j;
  j["utterances"] = index.records.size();
  j["feature_dim"] = latents.cols();
  return j;
}

Json stage_train_rank(const PipelineConfig& config) {
  const Exec exec = exec_for(config);
  const CorpusIndex index = scan_corpus(config.manifest);
  const RowMatrix latents = read_rows(artifact(config, kLatentFile), index, {"mu", "logvar"});
  const std::vector<Label> labels = labels_of(index);
  const PairSet pairs = build_pairs(latents, labels, config.max_ordered, config.max_similar,
                                    stage_seeds(config.seed).pairs);
  RankModel model = train_sgd(pairs, config.rank);
  model = normalize_fit(model, score_rows(model, latents, exec));
  write_tagged_json(artifact(config, kRankFile), rank_to_json(model), config);
  Json j;
  j["ordered_pairs"] = pairs.ordered.size();
  j["similar_pairs"] = pairs.similar.size();
  j["train_pairwise_accuracy"] = pairwise_accuracy(model, pairs);
  j["objective"] = objective(model.w, pairs, model.lambda, model.mu_s);
  j["score_min"] = model.score_min;
  j["score_max"] = model.score_max;
  return j;
}

Json stage_score(const PipelineConfig& config) {
  const Exec exec = exec_for(config);
  const CorpusIndex index = scan_corpus(config.manifest);
  const RowMatrix latents = read_rows(artifact(config, kLatentFile), index, {"mu", "logvar"});
  const RankModel model = load_rank(artifact(config, kRankFile));
  const std::vector<double> raw = score_rows(model, latents, exec);
  std::vector<ScoredUtterance> rows;
  double sum[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  std::vector<double> severity;
  std::vector<double> syn_orig;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const UtteranceRecord& r = index.records[i];
    const double o = originality_of_score(model, raw[i]);
    rows.push_back({r.id, r.label, raw[i], o});
    const int c = r.label == Label::kRecorded ? 0 : 1;
    sum[c] += o;
    ++count[c];
    if (r.degradation) {
      severity.push_back(*r.degradation);
      syn_orig.push_back(o);
    }
  }
  write_text_file(artifact(config, kScoresFile), scores_to_csv(rows));
  Json j;
  j["mean_originality_recorded"] = count[0] ? sum[0] / static_cast<double>(count[0]) : 0.0;
  j["mean_originality_synthetic"] = count[1] ? sum[1] / static_cast<double>(count[1]) : 0.0;
  if (severity.size() >= 2) {
    j["spearman_originality_severity"] = spearman(syn_orig, severity);
  } else {
    j["spearman_originality_severity"] = nullptr;
  }
  return j;
}

Json stage_select(const PipelineConfig& config) {
  const std::vector<ScoredUtterance> scores =
      scores_from_csv(read_text_file(artifact(config, kScoresFile)));
  const SelectionManifest m =
      select(scores, config.selection, file_hash(artifact(config, kRankFile)));
  write_text_file(artifact(config, kSelectionFile), selection_to_csv(m));
  Json sidecar = Json::parse(selection_sidecar_json(m));
  sidecar["config_hash"] = config.hash();
  write_text_file(artifact(config, kSelectionSidecar), sidecar.dump(1) + "\n");
  Json j;
  j["policy"] = config.selection.describe();
  j["selected_recorded"] = m.selected_count(Label::kRecorded);
  j["selected_synthetic"] = m.selected_count(Label::kSynthetic);
  j["discarded_synthetic"] = std::count_if(m.entries.begin(), m.entries.end(), [](const SelectionEntry& e) {
    return e.label == Label::kSynthetic && !e.selected;
  });
  return j;
}

Json stage_metrics(const PipelineConfig& config) {
  const Exec exec = exec_for(config);
  const CorpusIndex index = scan_corpus(config.manifest);
  const std::vector<ScoredUtterance> scores =
      scores_from_csv(read_text_file(artifact(config, kScoresFile)));
  std::vector<ScoredUtterance> synthetic;
  for (const auto& s : scores) {
    if (s.label == Label::kSynthetic) synthetic.push_back(s);
  }
  const auto [high, low] = split_extremes(synthetic, config.extremes_fraction);

  // Only the extreme items and their bases need frame features.
  CorpusIndex subset;
  subset.root = index.root;
  for (const auto* group : {&high, &low}) {
    for (const auto& s : *group) {
      const std::size_t i = index.find(s.id);
      require(i != CorpusIndex::npos, Errc::kNotFound, "scored id " + s.id + " not in manifest");
      subset.records.push_back(index.records[i]);
    }
  }
  const Dataset d = dataset_from_corpus(subset, config.features, true, exec);
  std::vector<ScoredUtterance> sub_scores;
  for (const auto* group : {&high, &low}) sub_scores.insert(sub_scores.end(), group->begin(), group->end());
  const ExtremeAnalysis a = analyze_extremes(d, sub_scores, 0.5);
  write_text_file(artifact(config, kMetricsFile), report_csv(a.high_report, a.low_report));
  write_text_file(artifact(config, kMetricsTable), report_table(a.high_report, a.low_report));
  Json j;
  j["high"] = report_json(a.high_report);
  j["low"] = report_json(a.low_report);
  return j;
}

Json stage_histogram(const PipelineConfig& config) {
  const std::vector<ScoredUtterance> scores =
      scores_from_csv(read_text_file(artifact(config, kScoresFile)));
  std::vector<NamedScores> classes = {{"recorded", {}}, {"synthetic", {}}};
  for (const auto& s : scores) {
    classes[s.label == Label::kRecorded ? 0 : 1].second.push_back(s.originality);
  }
  const Histogram h = histogram(classes, config.histogram_bins);
  write_text_file(artifact(config, kHistogramFile), histogram_csv(h));
  write_text_file(artifact(config, kHistogramSvg), histogram_svg(h));
  Json j;
  j["bins"] = h.bins;
  for (const auto& c : h.classes) j["counts_" + c.name] = c.counts;
  return j;
}

Json stage_project(const PipelineConfig& config) {
  const Exec exec = exec_for(config);
  const CorpusIndex index = scan_corpus(config.manifest);
  const RowMatrix mu = read_rows(artifact(config, kLatentFile), index, {"mu"});
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  for (const auto& r : index.records) {
    ids.push_back(r.id);
    labels.emplace_back(label_name(r.label));
  }
  const Projection2D pca = pca_project(mu, ids);
  const Projection2D tsne = tsne_project(mu, ids, config.tsne, exec);
  std::string csv = projection_csv(pca, labels);
  const std::string tsne_csv = projection_csv(tsne, labels);
  csv += tsne_csv.substr(tsne_csv.find('\n') + 1);
  write_text_file(artifact(config, kProjectionFile), csv);
  write_text_file(artifact(config, kPcaSvg), scatter_svg(pca, labels));
  write_text_file(artifact(config, kTsneSvg), scatter_svg(tsne, labels));
  Json j;
  j["pca_variance"] = {pca.variance[0], pca.variance[1]};
  j["tsne_initial_kl"] = tsne.initial_kl;
  j["tsne_final_kl"] = tsne.final_kl;
  j["tsne_unconverged_points"] = tsne.unconverged_points;
  return j;
}

std::string run_pipeline(const PipelineConfig& config) {
  require(!config.manifest.empty(), Errc::kInvalidConfig, "paths.manifest is required");
  require(!config.work_dir.empty(), Errc::kInvalidConfig, "paths.work_dir is required");
  std::filesystem::create_directories(config.work_dir);
  Json summary;
  summary["version"] = kSummaryVersion;
  summary["config_hash"] = config.hash();
  summary["seed"] = config.seed;
  const CorpusIndex index = run_stage("scan", [&] {
    CorpusIndex i = scan_corpus(config.manifest);
    require(i.has_both_classes(), Errc::kMissingClass, "corpus needs both classes");
    return i;
  });
  Json corpus;
  corpus["recorded"] = index.count(Label::kRecorded);
  corpus["synthetic"] = index.count(Label::kSynthetic);
  corpus["manifest_hash"] = file_hash(config.manifest);
  summary["corpus"] = corpus;

  struct Step {
    const char* name;
    Json (*fn)(const PipelineConfig&);
    std::vector<const char*> outputs;
  };
  const std::vector<Step> steps = {
      {"extract", stage_extract, {kPooledFile}},
      {"train-vae", stage_train_vae, {kPretrainFile}},
      {"finetune-vae", stage_finetune_vae, {kVaeFile}},
      {"encode", stage_encode, {kLatentFile}},
      {"train-rank", stage_train_rank, {kRankFile}},
      {"score", stage_score, {kScoresFile}},
      {"select", stage_select, {kSelectionFile, kSelectionSidecar}},
      {"metrics", stage_metrics, {kMetricsFile, kMetricsTable}},
      {"histogram", stage_histogram, {kHistogramFile, kHistogramSvg}},
      {"project", stage_project, {kProjectionFile, kPcaSvg, kTsneSvg}},
  };
  Json stages;
  for (const auto& step : steps) {
    Json report = run_stage(step.name, [&] { return step.fn(config); });
    Json hashes;
    for (const char* out : step.outputs) hashes[out] = file_hash(artifact(config, out));
    report["artifacts"] = hashes;
    stages[step.name] = std::move(report);
  }
  summary["stages"] = std::move(stages);
  const std::string text = summary.dump(1) + "\n";
  write_text_file(artifact(config, kSummaryFile), text);
  return text;
}

}  // namespace originrank
