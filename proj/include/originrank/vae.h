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

#ifndef ORIGINRANK_VAE_H_
#define ORIGINRANK_VAE_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "originrank/kernels.h"
#include "originrank/matrix.h"
#include "originrank/optimizer.h"

namespace originrank {

struct VaeHyperParams {
  int latent_dim = 16;
  int hidden_dim = 64;
  double beta = 1.0;
};

struct VaeTrainConfig {
  int epochs = 100;
  int batch_size = 16;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double beta = 1.0;

  void validate() const;
};

// Dense layer views into VaeModel::params. Weights are (out x in), row-major,
// followed by the bias.
enum VaeLayer { kEncHidden = 0, kEncMu, kEncLogvar, kDecHidden, kDecOut, kNumVaeLayers };

struct VaeModel {
  int input_dim = 0;
  VaeHyperParams hyper;
  std::vector<double> params;
  std::vector<double> norm_mean;
  std::vector<double> norm_std;

  int layer_out(VaeLayer layer) const;
  int layer_in(VaeLayer layer) const;
  std::size_t weight_offset(VaeLayer layer) const;
  std::size_t bias_offset(VaeLayer layer) const;
  std::size_t param_count() const;

  Eigen::Map<const RowMatrix> weights(VaeLayer layer) const;
  Eigen::Map<RowMatrix> weights(VaeLayer layer);
  Eigen::Map<const Eigen::VectorXd> bias(VaeLayer layer) const;
  Eigen::Map<Eigen::VectorXd> bias(VaeLayer layer);
};

struct LatentStats {
  std::vector<double> mu;
  std::vector<double> logvar;
};

struct VaeLoss {
  double loss = 0.0;
  double recon = 0.0;
  double kl = 0.0;
};

struct VaeGradient {
  VaeLoss loss;
  std::vector<double> grad;  // aligned with VaeModel::params
};

struct VaeTrainResult {
  VaeModel model;
  std::vector<VaeLoss> epoch_loss;  // mean over each epoch's minibatches
};

constexpr double kLogvarClamp = 10.0;
constexpr double kNormStdFloor = 1e-6;

// Xavier-uniform weights and zero biases; identity normalization.
VaeModel init_vae(int input_dim, const VaeHyperParams& hyper, std::uint64_t seed);

// Per-column mean and population std (floored) of the rows of data.
void fit_normalization(VaeModel& model, const RowMatrix& data);

// Maps raw pooled vectors into the model's normalized space.
RowMatrix normalize_rows(const VaeModel& model, const RowMatrix& data);

LatentStats encode(const VaeModel& model, std::span<const double> pooled);
std::vector<double> reparameterize(const LatentStats& stats, std::mt19937_64& rng);
// Decoder output in normalized space.
std::vector<double> decode(const VaeModel& model, std::span<const double> z);

// KL(N(mu, exp(logvar)) || N(0, I)) for one posterior.
double kl_divergence(std::span<const double> mu, std::span<const double> logvar);

// Standard-normal noise for a batch, one row per example.
RowMatrix draw_noise(std::size_t rows, int latent_dim, std::mt19937_64& rng);

// Loss on a batch of raw pooled vectors with explicit reparameterization noise.
VaeLoss elbo_loss(const VaeModel& model, const RowMatrix& batch, const RowMatrix& noise);
VaeLoss elbo_loss(const VaeModel& model, const RowMatrix& batch, std::mt19937_64& rng);

// Analytic gradient of elbo_loss with the same noise.
VaeGradient backward(const VaeModel& model, const RowMatrix& batch, const RowMatrix& noise);
VaeGradient backward(const VaeModel& model, const RowMatrix& batch, std::mt19937_64& rng);

// Pretraining: fits normalization on data, then optimizes from init.
VaeTrainResult train_vae(const RowMatrix& data, const VaeHyperParams& hyper,
                         const VaeTrainConfig& config);

// Continues from model over recorded and synthetic rows; normalization stays fixed.
VaeTrainResult finetune_vae(const VaeModel& model, const RowMatrix& recorded,
                            const RowMatrix& synthetic, const VaeTrainConfig& config);

// mu followed by logvar.
std::vector<double> latent_features(const VaeModel& model, std::span<const double> pooled);
RowMatrix latent_batch(const VaeModel& model, const RowMatrix& pooled,
                       Exec exec = Exec::kParallel);

std::string vae_to_json(const VaeModel& model);
VaeModel vae_from_json(const std::string& text);
void save_vae(const VaeModel& model, const std::filesystem::path& path);
VaeModel load_vae(const std::filesystem::path& path);

}  // namespace originrank

#endif  // ORIGINRANK_VAE_H_
