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

#ifndef ORIGINRANK_METRICS_H_
#define ORIGINRANK_METRICS_H_

#include <span>
#include <string>
#include <utility>

#include "originrank/features.h"

namespace originrank {

struct F0Rmse {
  double value = 0.0;     // 0 when no frame is voiced in both tracks
  std::size_t support = 0;  // number of mutually voiced frames

  bool defined() const { return support > 0; }
};

F0Rmse f0_rmse(const FrameFeatures& a, const FrameFeatures& b);
double lsd(const FrameFeatures& a, const FrameFeatures& b);
double gain_rmse(const FrameFeatures& a, const FrameFeatures& b);
double vuv_error_rate(const FrameFeatures& a, const FrameFeatures& b);

struct PairMetrics {
  F0Rmse f0;
  double lsd_db = 0.0;
  double gain_db = 0.0;
  double vuv_pct = 0.0;
};

PairMetrics pair_metrics(const FrameFeatures& a, const FrameFeatures& b);

struct Interval {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
};

// mean +/- 1.96 s / sqrt(n) with the sample standard deviation s.
Interval ci95(std::span<const double> values);

struct MetricReport {
  Interval f0_rmse_hz;  // over utterances with a defined F0 RMSE
  Interval lsd_db;
  Interval gain_rmse_db;
  Interval vuv_error_pct;
  std::size_t n_utterances = 0;
};

MetricReport summarize(std::span<const PairMetrics> pairs);

// Reports for the high- and low-originality groups.
std::pair<MetricReport, MetricReport> group_report(std::span<const PairMetrics> high,
                                                   std::span<const PairMetrics> low);

// Rows (group, metric, mean, ci_half_width, n).
std::string report_csv(const MetricReport& high, const MetricReport& low);
std::string report_table(const MetricReport& high, const MetricReport& low);

}  // namespace originrank

#endif  // ORIGINRANK_METRICS_H_
