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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "originrank/error.h"
#include "originrank/pipeline.h"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = -1;
};

using StageFn = originrank::Json (*)(const originrank::PipelineConfig&);

struct Command {
  const char* name;
  const char* help;
  StageFn fn;
};

const Command kCommands[] = {
    {"extract", "Frame features and pooled vectors for every manifest entry",
     originrank::stage_extract},
    {"train-vae", "Pretrain the VAE on recorded utterances", originrank::stage_train_vae},
    {"finetune-vae", "Fine-tune the VAE on both classes", originrank::stage_finetune_vae},
    {"encode", "Latent mean and log-variance per utterance", originrank::stage_encode},
    {"train-rank", "Build pairs and train the ranking model", originrank::stage_train_rank},
    {"score", "Raw scores and originality per utterance", originrank::stage_score},
    {"select", "Apply the selection policy", originrank::stage_select},
    {"metrics", "Distortion metrics of the extreme originality groups",
     originrank::stage_metrics},
    {"project", "PCA and t-SNE projections of the latent means", originrank::stage_project},
    {"histogram", "Originality histograms per class", originrank::stage_histogram},
};

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config, "Run configuration (JSON)")->required();
  sub->add_option("--seed", opt.seed, "Global seed, overriding the config");
  sub->add_option("--out", opt.out, "Work directory, overriding the config");
  sub->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
}

originrank::PipelineConfig resolve(const Options& opt) {
  originrank::PipelineConfig config = originrank::load_pipeline_config(opt.config);
  if (opt.seed) originrank::set_seed(config, *opt.seed);
  if (!opt.out.empty()) config.work_dir = opt.out;
  if (opt.threads >= 0) config.threads = opt.threads;
  return config;
}

void require_paths(const originrank::PipelineConfig& config) {
  originrank::require(!config.manifest.empty(), originrank::Errc::kInvalidConfig,
                      "paths.manifest is required");
  originrank::require(!config.work_dir.empty(), originrank::Errc::kInvalidConfig,
                      "paths.work_dir is required (or pass --out)");
  std::filesystem::create_directories(config.work_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Originality ranking of synthetic speech against recorded speech"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Render a simulated recorded/synthetic corpus with a manifest");
  add_common(simulate, opt);
  for (const Command& c : kCommands) add_common(app.add_subcommand(c.name, c.help), opt);
  CLI::App* run = app.add_subcommand("run", "Run every stage and write summary.json");
  add_common(run, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const originrank::PipelineConfig config = resolve(opt);
    if (simulate->parsed()) {
      // --out names the corpus directory; otherwise the manifest's directory.
      std::filesystem::path dir = opt.out;
      if (dir.empty()) dir = config.manifest.parent_path();
      originrank::require(!dir.empty(), originrank::Errc::kInvalidConfig,
                          "simulate needs --out or paths.manifest");
      std::cout << originrank::stage_simulate(config, dir).dump(1) << "\n";
      return 0;
    }
    require_paths(config);
    if (run->parsed()) {
      std::cout << originrank::run_pipeline(config);
      return 0;
    }
    for (const Command& c : kCommands) {
      if (app.got_subcommand(c.name)) {
        std::cout << c.fn(config).dump(1) << "\n";
        return 0;
      }
    }
  } catch (const originrank::Error& e) {
    std::cerr << "originrank: " << e.what() << "\n";
    return originrank::exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "originrank: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "originrank: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
