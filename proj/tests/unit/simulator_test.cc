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

#include "originrank/simulator.h"

#include <map>

#include "originrank/features.h"
#include "originrank/io_util.h"
#include "originrank/metrics.h"
#include "test_util.h"

namespace originrank {
namespace {

using testing::TempDir;

SimConfig small_config() {
  SimConfig c;
  c.n_recorded = 3;
  c.n_synthetic = 4;
  c.duration_min = 0.4;
  c.duration_max = 0.6;
  return c;
}

TEST_CASE("invalid simulator configs") {
  SimConfig c = small_config();
  c.n_recorded = 0;
  CHECK_ERRC(c.validate(), Errc::kInvalidConfig);
  c = small_config();
  c.duration_min = 2.0;
  c.duration_max = 1.0;
  CHECK_ERRC(c.validate(), Errc::kInvalidConfig);
  c = small_config();
  c.sample_rate = 0;
  CHECK_ERRC(c.validate(), Errc::kInvalidConfig);
  c = small_config();
  c.severity_max = 1.5;
  CHECK_ERRC(c.validate(), Errc::kInvalidConfig);
}

TEST_CASE("same seed gives byte-identical corpora") {
  TempDir a("sim");
  TempDir b("sim");
  const CorpusIndex ia = simulate_corpus(small_config(), 5, a.path());
  const CorpusIndex ib = simulate_corpus(small_config(), 5, b.path());
  CHECK(read_text_file(a / "manifest.jsonl") == read_text_file(b / "manifest.jsonl"));
  REQUIRE(ia.records.size() == 7);
  for (const auto& r : ia.records) {
    CHECK(read_text_file(a / r.path) == read_text_file(b / r.path));
  }
  CHECK(ia.count(Label::kRecorded) == 3);
  CHECK(ia.count(Label::kSynthetic) == 4);
  for (const auto& r : ia.records) {
    CHECK(r.degradation.has_value() == (r.label == Label::kSynthetic));
    CHECK(r.base_path.has_value() == (r.label == Label::kSynthetic));
  }
  TempDir c("sim");
  simulate_corpus(small_config(), 6, c.path());
  CHECK(read_text_file(a / "manifest.jsonl") != read_text_file(c / "manifest.jsonl"));
}

TEST_CASE("zero severity leaves the envelope intact") {
  SimConfig c = small_config();
  c.severity_min = 0.0;
  c.severity_max = 0.0;
  const FeatureConfig fc;
  for (const auto& u : simulate_utterances(c, 9)) {
    if (!u.base_waveform) continue;
    const double d = lsd(extract_features(u.waveform, fc), extract_features(*u.base_waveform, fc));
    CHECK(d < 0.1);
  }
}

TEST_CASE("degradation parameters follow severity") {
  std::mt19937_64 rng(3);
  const UtteranceParams base = draw_clean_params(small_config(), rng);
  const UtteranceParams clean = degrade(base, 0.0, rng);
  CHECK(clean.f0 == base.f0);
  CHECK(clean.voiced == base.voiced);
  CHECK(clean.envelope_db == base.envelope_db);
  const UtteranceParams harsh = degrade(base, 1.0, rng);
  CHECK(harsh.noise_floor_db == doctest::Approx(base.noise_floor_db + 30.0));
  CHECK_ERRC(degrade(base, 1.2, rng), Errc::kOutOfRange);
}

TEST_CASE("mean LSD to the base is nondecreasing across severity buckets") {
  const FeatureConfig fc;
  std::map<int, std::pair<double, int>> buckets;
  for (int bucket = 0; bucket < 3; ++bucket) {
    SimConfig c = small_config();
    c.n_recorded = 1;
    c.n_synthetic = 20;
    c.severity_min = bucket / 3.0;
    c.severity_max = (bucket + 1) / 3.0;
    for (const auto& u : simulate_utterances(c, 100 + static_cast<std::uint64_t>(bucket))) {
      if (!u.base_waveform) continue;
      auto& [sum, n] = buckets[bucket];
      sum += lsd(extract_features(u.waveform, fc), extract_features(*u.base_waveform, fc));
      ++n;
    }
  }
  double prev = -1.0;
  for (const auto& [bucket, acc] : buckets) {
    CHECK(acc.second >= 20);
    const double mean = acc.first / acc.second;
    CHECK(mean >= prev);
    prev = mean;
  }
}

TEST_CASE("ground truth tracks are consistent") {
  std::mt19937_64 rng(4);
  const UtteranceParams p = draw_clean_params(small_config(), rng);
  const FrameFeatures t = ground_truth_tracks(p);
  REQUIRE(t.frames() == p.frames());
  for (std::size_t i = 0; i < t.frames(); ++i) {
    CHECK((t.vuv[i] == 0) == (t.f0[i] == 0.0));
  }
  const Waveform w = render_utterance(p);
  CHECK(w.samples.size() == p.num_samples);
  for (double s : w.samples) REQUIRE(std::abs(s) <= 1.0);
}

}  // namespace
}  // namespace originrank
