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

#include "originrank/vae.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "originrank/error.h"
#include "originrank/io_util.h"

namespace originrank {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kVaeVersion = "vae-1";
constexpr const char* kLayerNames[kNumVaeLayers] = {"enc_hidden", "enc_mu", "enc_logvar",
                                                     "dec_hidden", "dec_out"};

struct Forward {
  RowMatrix x;       // normalized input
  RowMatrix h;       // encoder hidden
  RowMatrix mu;
  RowMatrix logvar;  // clamped
  RowMatrix raw_logvar;
  RowMatrix z;
  RowMatrix g;       // decoder hidden
  RowMatrix xhat;
};

Eigen::RowVectorXd row_of(const Eigen::Map<const Eigen::VectorXd>& b) { return b.transpose(); }

Forward forward_pass(const VaeModel& m, const RowMatrix& batch, const RowMatrix& noise) {
  Forward f;
  f.x = normalize_rows(m, batch);
  f.h = ((f.x * m.weights(kEncHidden).transpose()).rowwise() + row_of(m.bias(kEncHidden)))
            .array()
            .tanh();
  f.mu = (f.h * m.weights(kEncMu).transpose()).rowwise() + row_of(m.bias(kEncMu));
  f.raw_logvar =
      (f.h * m.weights(kEncLogvar).transpose()).rowwise() + row_of(m.bias(kEncLogvar));
  f.logvar = f.raw_logvar.cwiseMax(-kLogvarClamp).cwiseMin(kLogvarClamp);
  f.z = f.mu.array() + (0.5 * f.logvar.array()).exp() * noise.array();
  f.g = ((f.z * m.weights(kDecHidden).transpose()).rowwise() + row_of(m.bias(kDecHidden)))
            .array()
            .tanh();
  f.xhat = (f.g * m.weights(kDecOut).transpose()).rowwise() + row_of(m.bias(kDecOut));
  return f;
}

VaeLoss loss_of(const VaeModel& m, const Forward& f) {
  const auto batch = static_cast<double>(f.x.rows());
  const double recon = (f.xhat - f.x).array().square().sum() /
                       (batch * static_cast<double>(m.input_dim));
  const double kl =
      0.5 * (f.mu.array().square() + f.logvar.array().exp() - f.logvar.array() - 1.0).sum() /
      batch;
  return {recon + m.hyper.beta * kl, recon, kl};
}

void check_batch(const VaeModel& m, const RowMatrix& batch, const RowMatrix& noise) {
  require(batch.rows() > 0, Errc::kTooFewSamples, "empty VAE batch");
  require(batch.cols() == m.input_dim, Errc::kDimMismatch, "VAE input dimension mismatch");
  require(noise.rows() == batch.rows() && noise.cols() == m.hyper.latent_dim,
          Errc::kDimMismatch, "VAE noise shape mismatch");
}

Json vector_json(std::span<const double> v) { return Json(std::vector<double>(v.begin(), v.end())); }

std::vector<double> json_vector(const Json& j, std::size_t expected, const char* what) {
  auto v = j.get<std::vector<double>>();
  require(v.size() == expected, Errc::kParseError, std::string("bad length for ") + what);
  return v;
}

VaeTrainResult optimize(VaeModel model, const RowMatrix& data, const VaeTrainConfig& config) {
  config.validate();
  require(data.rows() >= 2 * static_cast<Eigen::Index>(config.batch_size),
          Errc::kTooFewSamples,
          "VAE training needs at least 2 * batch_size vectors, got " +
              std::to_string(data.rows()));
  require(data.cols() == model.input_dim, Errc::kDimMismatch, "VAE input dimension mismatch");
  model.hyper.beta = config.beta;

  VaeTrainResult result;
  std::mt19937_64 rng(config.seed);
  Optimizer opt(config.optimizer, config.learning_rate);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(data.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto bs = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    VaeLoss sum;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      RowMatrix batch(static_cast<Eigen::Index>(end - start), data.cols());
      for (std::size_t r = start; r < end; ++r) {
        batch.row(static_cast<Eigen::Index>(r - start)) = data.row(order[r]);
      }
      const RowMatrix noise = draw_noise(end - start, model.hyper.latent_dim, rng);
      VaeGradient g = backward(model, batch, noise);
      if (!std::isfinite(g.loss.loss)) {
        throw Error(Errc::kNumericFailure,
                    "VAE loss became non-finite in epoch " + std::to_string(epoch));
      }
      opt.step(model.params, g.grad);
      sum.loss += g.loss.loss;
      sum.recon += g.loss.recon;
      sum.kl += g.loss.kl;
      ++batches;
    }
    result.epoch_loss.push_back({sum.loss / batches, sum.recon / batches, sum.kl / batches});
  }
  result.model = std::move(model);
  return result;
}

}  // namespace

void VaeTrainConfig::validate() const {
  require(epochs >= 1, Errc::kInvalidConfig, "epochs must be >= 1");
  require(batch_size >= 1, Errc::kInvalidConfig, "batch_size must be >= 1");
  require(learning_rate >= 0.0 && std::isfinite(learning_rate), Errc::kInvalidConfig,
          "learning_rate must be finite and >= 0");
  require(beta >= 0.0 && std::isfinite(beta), Errc::kInvalidConfig, "beta must be >= 0");
}

int VaeModel::layer_out(VaeLayer layer) const {
  switch (layer) {
    case kEncHidden:
    case kDecHidden:
      return hyper.hidden_dim;
    case kEncMu:
    case kEncLogvar:
      return hyper.latent_dim;
    default:
      return input_dim;
  }
}

int VaeModel::layer_in(VaeLayer layer) const {
  switch (layer) {
    case kEncHidden:
      return input_dim;
    case kDecHidden:
      return hyper.latent_dim;
    default:
      return hyper.hidden_dim;
  }
}

std::size_t VaeModel::weight_offset(VaeLayer layer) const {
  std::size_t off = 0;
  for (int l = 0; l < layer; ++l) {
    const auto v = static_cast<VaeLayer>(l);
    off += static_cast<std::size_t>(layer_out(v)) * static_cast<std::size_t>(layer_in(v) + 1);
  }
  return off;
}

std::size_t VaeModel::bias_offset(VaeLayer layer) const {
  return weight_offset(layer) +
         static_cast<std::size_t>(layer_out(layer)) * static_cast<std::size_t>(layer_in(layer));
}

std::size_t VaeModel::param_count() const { return weight_offset(kNumVaeLayers); }

Eigen::Map<const RowMatrix> VaeModel::weights(VaeLayer layer) const {
  return {params.data() + weight_offset(layer), layer_out(layer), layer_in(layer)};
}

Eigen::Map<RowMatrix> VaeModel::weights(VaeLayer layer) {
  return {params.data() + weight_offset(layer), layer_out(layer), layer_in(layer)};
}

Eigen::Map<const Eigen::VectorXd> VaeModel::bias(VaeLayer layer) const {
  return {params.data() + bias_offset(layer), layer_out(layer)};
}

Eigen::Map<Eigen::VectorXd> VaeModel::bias(VaeLayer layer) {
  return {params.data() + bias_offset(layer), layer_out(layer)};
}

VaeModel init_vae(int input_dim, const VaeHyperParams& hyper, std::uint64_t seed) {
  require(input_dim > 0 && hyper.latent_dim > 0 && hyper.hidden_dim > 0,
          Errc::kInvalidConfig, "VAE dimensions must be positive");
  VaeModel m;
  m.input_dim = input_dim;
  m.hyper = hyper;
  m.params.assign(m.param_count(), 0.0);
  m.norm_mean.assign(static_cast<std::size_t>(input_dim), 0.0);
  m.norm_std.assign(static_cast<std::size_t>(input_dim), 1.0);
  std::mt19937_64 rng(seed);
  for (int l = 0; l < kNumVaeLayers; ++l) {
    const auto layer = static_cast<VaeLayer>(l);
    const double bound = std::sqrt(6.0 / (m.layer_in(layer) + m.layer_out(layer)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto w = m.weights(layer);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  }
  return m;
}

void fit_normalization(VaeModel& model, const RowMatrix& data) {
  require(data.rows() >= 1, Errc::kTooFewSamples, "normalization needs data");
  require(data.cols() == model.input_dim, Errc::kDimMismatch, "VAE input dimension mismatch");
  const auto n = static_cast<double>(data.rows());
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    const double mean = data.col(c).sum() / n;
    const double var = (data.col(c).array() - mean).square().sum() / n;
    model.norm_mean[static_cast<std::size_t>(c)] = mean;
    model.norm_std[static_cast<std::size_t>(c)] = std::max(std::sqrt(var), kNormStdFloor);
  }
}

RowMatrix normalize_rows(const VaeModel& model, const RowMatrix& data) {
  require(data.cols() == model.input_dim, Errc::kDimMismatch, "VAE input dimension mismatch");
  const Eigen::Map<const Eigen::RowVectorXd> mean(model.norm_mean.data(), model.input_dim);
  const Eigen::Map<const Eigen::RowVectorXd> stdev(model.norm_std.data(), model.input_dim);
  return (data.rowwise() - mean).array().rowwise() / stdev.array();
}

LatentStats encode(const VaeModel& model, std::span<const double> pooled) {
  require(pooled.size() == static_cast<std::size_t>(model.input_dim), Errc::kDimMismatch,
          "pooled vector has dimension " + std::to_string(pooled.size()) + ", model expects " +
              std::to_string(model.input_dim));
  Eigen::VectorXd x(model.input_dim);
  for (int i = 0; i < model.input_dim; ++i) {
    const auto k = static_cast<std::size_t>(i);
    x[i] = (pooled[k] - model.norm_mean[k]) / model.norm_std[k];
  }
  const Eigen::VectorXd h =
      (model.weights(kEncHidden) * x + model.bias(kEncHidden)).array().tanh();
  const Eigen::VectorXd mu = model.weights(kEncMu) * h + model.bias(kEncMu);
  const Eigen::VectorXd lv = (model.weights(kEncLogvar) * h + model.bias(kEncLogvar))
                                 .cwiseMax(-kLogvarClamp)
                                 .cwiseMin(kLogvarClamp);
  return {std::vector<double>(mu.data(), mu.data() + mu.size()),
          std::vector<double>(lv.data(), lv.data() + lv.size())};
}

std::vector<double> reparameterize(const LatentStats& stats, std::mt19937_64& rng) {
  require(stats.mu.size() == stats.logvar.size(), Errc::kDimMismatch,
          "mu and logvar differ in size");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> z(stats.mu.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = stats.mu[i] + std::exp(0.5 * stats.logvar[i]) * gauss(rng);
  }
  return z;
}

std::vector<double> decode(const VaeModel& model, std::span<const double> z) {
  require(z.size() == static_cast<std::size_t>(model.hyper.latent_dim), Errc::kDimMismatch,
          "latent dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> zv(z.data(), model.hyper.latent_dim);
  const Eigen::VectorXd g =
      (model.weights(kDecHidden) * zv + model.bias(kDecHidden)).array().tanh();
  const Eigen::VectorXd out = model.weights(kDecOut) * g + model.bias(kDecOut);
  return {out.data(), out.data() + out.size()};
}

double kl_divergence(std::span<const double> mu, std::span<const double> logvar) {
  require(mu.size() == logvar.size(), Errc::kDimMismatch, "mu and logvar differ in size");
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    acc += mu[i] * mu[i] + std::exp(logvar[i]) - logvar[i] - 1.0;
  }
  return 0.5 * acc;
}

RowMatrix draw_noise(std::size_t rows, int latent_dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  RowMatrix e(static_cast<Eigen::Index>(rows), latent_dim);
  for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = gauss(rng);
  return e;
}

VaeLoss elbo_loss(const VaeModel& model, const RowMatrix& batch, const RowMatrix& noise) {
  check_batch(model, batch, noise);
  return loss_of(model, forward_pass(model, batch, noise));
}

VaeLoss elbo_loss(const VaeModel& model, const RowMatrix& batch, std::mt19937_64& rng) {
  return elbo_loss(model, batch,
                   draw_noise(static_cast<std::size_t>(batch.rows()), model.hyper.latent_dim, rng));
}

VaeGradient backward(const VaeModel& model, const RowMatrix& batch, const RowMatrix& noise) {
  check_batch(model, batch, noise);
  const Forward f = forward_pass(model, batch, noise);
  VaeGradient out;
  out.loss = loss_of(model, f);
  VaeModel g = model;  // gradient laid out like the parameters
  std::fill(g.params.begin(), g.params.end(), 0.0);

  const auto b = static_cast<double>(batch.rows());
  const double beta = model.hyper.beta;
  const RowMatrix d_xhat = (2.0 / (b * model.input_dim)) * (f.xhat - f.x);
  g.weights(kDecOut) = d_xhat.transpose() * f.g;
  g.bias(kDecOut) = d_xhat.colwise().sum().transpose();

  const RowMatrix d_a3 =
      ((d_xhat * model.weights(kDecOut)).array() * (1.0 - f.g.array().square())).matrix();
  g.weights(kDecHidden) = d_a3.transpose() * f.z;
  g.bias(kDecHidden) = d_a3.colwise().sum().transpose();

  const RowMatrix d_z = d_a3 * model.weights(kDecHidden);
  const RowMatrix sigma = (0.5 * f.logvar.array()).exp();
  const RowMatrix d_mu = d_z + (beta / b) * f.mu;
  RowMatrix d_lv = (d_z.array() * noise.array() * 0.5 * sigma.array() +
                    (beta / b) * 0.5 * (f.logvar.array().exp() - 1.0))
                       .matrix();
  for (Eigen::Index i = 0; i < d_lv.size(); ++i) {
    const double raw = f.raw_logvar.data()[i];
    if (raw < -kLogvarClamp || raw > kLogvarClamp) d_lv.data()[i] = 0.0;
  }
  g.weights(kEncMu) = d_mu.transpose() * f.h;
  g.bias(kEncMu) = d_mu.colwise().sum().transpose();
  g.weights(kEncLogvar) = d_lv.transpose() * f.h;
  g.bias(kEncLogvar) = d_lv.colwise().sum().transpose();

  const RowMatrix d_a1 = ((d_mu * model.weights(kEncMu) + d_lv * model.weights(kEncLogvar))
                              .array() *
                          (1.0 - f.h.array().square()))
                             .matrix();
  g.weights(kEncHidden) = d_a1.transpose() * f.x;
  g.bias(kEncHidden) = d_a1.colwise().sum().transpose();

  out.grad = std::move(g.params);
  return out;
}

VaeGradient backward(const VaeModel& model, const RowMatrix& batch, std::mt19937_64& rng) {
  return backward(model, batch,
                  draw_noise(static_cast<std::size_t>(batch.rows()), model.hyper.latent_dim, rng));
}

VaeTrainResult train_vae(const RowMatrix& data, const VaeHyperParams& hyper,
                         const VaeTrainConfig& config) {
  config.validate();
  require(data.rows() >= 2 * static_cast<Eigen::Index>(config.batch_size),
          Errc::kTooFewSamples,
          "VAE training needs at least 2 * batch_size vectors, got " +
              std::to_string(data.rows()));
  VaeModel model = init_vae(static_cast<int>(data.cols()), hyper, config.seed);
  fit_normalization(model, data);
  return optimize(std::move(model), data, config);
}

VaeTrainResult finetune_vae(const VaeModel& model, const RowMatrix& recorded,
                            const RowMatrix& synthetic, const VaeTrainConfig& config) {
  require(recorded.rows() > 0, Errc::kMissingClass, "fine-tuning needs recorded vectors");
  require(synthetic.rows() > 0, Errc::kMissingClass, "fine-tuning needs synthetic vectors");
  require(recorded.cols() == synthetic.cols(), Errc::kDimMismatch,
          "recorded and synthetic vectors differ in dimension");
  RowMatrix both(recorded.rows() + synthetic.rows(), recorded.cols());
  both << recorded, synthetic;
  return optimize(model, both, config);
}

std::vector<double> latent_features(const VaeModel& model, std::span<const double> pooled) {
  LatentStats s = encode(model, pooled);
  s.mu.insert(s.mu.end(), s.logvar.begin(), s.logvar.end());
  return s.mu;
}

RowMatrix latent_batch(const VaeModel& model, const RowMatrix& pooled, Exec exec) {
  require(pooled.cols() == model.input_dim, Errc::kDimMismatch, "VAE input dimension mismatch");
  const auto dim = static_cast<std::size_t>(pooled.cols());
  RowMatrix out(pooled.rows(), 2 * model.hyper.latent_dim);
  parallel_for(static_cast<std::size_t>(pooled.rows()), exec, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    const std::vector<double> f = latent_features(model, {pooled.data() + r * pooled.cols(), dim});
    std::copy(f.begin(), f.end(), out.data() + r * out.cols());
  });
  return out;
}

std::string vae_to_json(const VaeModel& model) {
  Json j;
  j["version"] = kVaeVersion;
  j["input_dim"] = model.input_dim;
  j["latent_dim"] = model.hyper.latent_dim;
  j["hidden_dim"] = model.hyper.hidden_dim;
  j["beta"] = model.hyper.beta;
  j["norm_mean"] = vector_json(model.norm_mean);
  j["norm_std"] = vector_json(model.norm_std);
  Json layers = Json::array();
  for (int l = 0; l < kNumVaeLayers; ++l) {
    const auto layer = static_cast<VaeLayer>(l);
    const auto w = model.weights(layer);
    const auto b = model.bias(layer);
    Json entry;
    entry["name"] = kLayerNames[l];
    entry["shape"] = {model.layer_out(layer), model.layer_in(layer)};
    entry["weights"] = vector_json({w.data(), static_cast<std::size_t>(w.size())});
    entry["bias"] = vector_json({b.data(), static_cast<std::size_t>(b.size())});
    layers.push_back(std::move(entry));
  }
  j["layers"] = std::move(layers);
  return j.dump(1) + "\n";
}

VaeModel vae_from_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    require(j.at("version") == kVaeVersion, Errc::kParseError,
            "unsupported VAE model version");
    VaeHyperParams hyper;
    hyper.latent_dim = j.at("latent_dim").get<int>();
    hyper.hidden_dim = j.at("hidden_dim").get<int>();
    hyper.beta = j.at("beta").get<double>();
    VaeModel m = init_vae(j.at("input_dim").get<int>(), hyper, 0);
    const auto dim = static_cast<std::size_t>(m.input_dim);
    m.norm_mean = json_vector(j.at("norm_mean"), dim, "norm_mean");
    m.norm_std = json_vector(j.at("norm_std"), dim, "norm_std");
    const Json& layers = j.at("layers");
    require(layers.size() == kNumVaeLayers, Errc::kParseError, "VAE model needs 5 layers");
    for (int l = 0; l < kNumVaeLayers; ++l) {
      const auto layer = static_cast<VaeLayer>(l);
      const Json& entry = layers[static_cast<std::size_t>(l)];
      require(entry.at("name") == kLayerNames[l], Errc::kParseError, "unexpected layer order");
      auto w = m.weights(layer);
      auto b = m.bias(layer);
      const auto wv = json_vector(entry.at("weights"), static_cast<std::size_t>(w.size()),
                                  kLayerNames[l]);
      const auto bv = json_vector(entry.at("bias"), static_cast<std::size_t>(b.size()),
                                  kLayerNames[l]);
      std::copy(wv.begin(), wv.end(), w.data());
      std::copy(bv.begin(), bv.end(), b.data());
    }
    for (double v : m.params) {
      require(std::isfinite(v), Errc::kParseError, "VAE model contains non-finite weights");
    }
    for (double s : m.norm_std) {
      require(s > 0.0, Errc::kParseError, "VAE normalization std must be positive");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, std::string("VAE model: ") + e.what());
  }
}

void save_vae(const VaeModel& model, const std::filesystem::path& path) {
  write_text_file(path, vae_to_json(model));
}

VaeModel load_vae(const std::filesystem::path& path) { return vae_from_json(read_text_file(path)); }

}  // namespace originrank
