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

#include "originrank/metrics.h"

#include <cmath>
#include <cstdio>
#include <vector>

#include "originrank/error.h"
#include "originrank/io_util.h"

namespace originrank {

namespace {

void check_aligned(const FrameFeatures& a, const FrameFeatures& b) {
  if (a.frames() != b.frames()) {
    throw Error(Errc::kLengthMismatch, "feature tracks have " + std::to_string(a.frames()) +
                                           " and " + std::to_string(b.frames()) + " frames");
  }
  require(a.gain.size() == a.frames() && b.gain.size() == b.frames() &&
              a.vuv.size() == a.frames() && b.vuv.size() == b.frames(),
          Errc::kLengthMismatch, "feature tracks are internally inconsistent");
}

}  // namespace

F0Rmse f0_rmse(const FrameFeatures& a, const FrameFeatures& b) {
  check_aligned(a, b);
  F0Rmse out;
  double ss = 0.0;
  for (std::size_t t = 0; t < a.frames(); ++t) {
    if (a.vuv[t] && b.vuv[t]) {
      const double d = a.f0[t] - b.f0[t];
      ss += d * d;
      ++out.support;
    }
  }
  if (out.support > 0) out.value = std::sqrt(ss / static_cast<double>(out.support));
  return out;
}

double lsd(const FrameFeatures& a, const FrameFeatures& b) {
  check_aligned(a, b);
  require(a.n_mel == b.n_mel, Errc::kLengthMismatch, "envelopes differ in band count");
  require(a.frames() > 0, Errc::kLengthMismatch, "empty feature tracks");
  const auto k = static_cast<std::size_t>(a.n_mel);
  double total = 0.0;
  for (std::size_t t = 0; t < a.frames(); ++t) {
    double ss = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double d = a.envelope[t * k + j] - b.envelope[t * k + j];
      ss += d * d;
    }
    total += std::sqrt(ss / static_cast<double>(k));
  }
  return total / static_cast<double>(a.frames());
}

double gain_rmse(const FrameFeatures& a, const FrameFeatures& b) {
  check_aligned(a, b);
  require(a.frames() > 0, Errc::kLengthMismatch, "empty feature tracks");
  double ss = 0.0;
  for (std::size_t t = 0; t < a.frames(); ++t) {
    const double d = a.gain[t] - b.gain[t];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(a.frames()));
}

double vuv_error_rate(const FrameFeatures& a, const FrameFeatures& b) {
  check_aligned(a, b);
  require(a.frames() > 0, Errc::kLengthMismatch, "empty feature tracks");
  std::size_t diff = 0;
  for (std::size_t t = 0; t < a.frames(); ++t) diff += (a.vuv[t] != 0) != (b.vuv[t] != 0);
  return 100.0 * static_cast<double>(diff) / static_cast<double>(a.frames());
}

PairMetrics pair_metrics(const FrameFeatures& a, const FrameFeatures& b) {
  return {f0_rmse(a, b), lsd(a, b), gain_rmse(a, b), vuv_error_rate(a, b)};
}

Interval ci95(std::span<const double> values) {
  const std::size_t n = values.size();
  require(n >= 2, Errc::kTooFew, "a confidence interval needs at least 2 values");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double s = std::sqrt(ss / static_cast<double>(n - 1));
  return {mean, 1.96 * s / std::sqrt(static_cast<double>(n)), n};
}

MetricReport summarize(std::span<const PairMetrics> pairs) {
  std::vector<double> f0;
  std::vector<double> l;
  std::vector<double> g;
  std::vector<double> v;
  for (const auto& p : pairs) {
    if (p.f0.defined()) f0.push_back(p.f0.value);
    l.push_back(p.lsd_db);
    g.push_back(p.gain_db);
    v.push_back(p.vuv_pct);
  }
  MetricReport r;
  r.n_utterances = pairs.size();
  r.f0_rmse_hz = ci95(f0);
  r.lsd_db = ci95(l);
  r.gain_rmse_db = ci95(g);
  r.vuv_error_pct = ci95(v);
  return r;
}

std::pair<MetricReport, MetricReport> group_report(std::span<const PairMetrics> high,
                                                   std::span<const PairMetrics> low) {
  return {summarize(high), summarize(low)};
}

std::string report_csv(const MetricReport& high, const MetricReport& low) {
  std::string out = "group,metric,mean,ci_half_width,n\n";
  auto rows = [&](const char* group, const MetricReport& r) {
    const std::pair<const char*, const Interval*> items[] = {
        {"f0_rmse_hz", &r.f0_rmse_hz},
        {"lsd_db", &r.lsd_db},
        {"gain_rmse_db", &r.gain_rmse_db},
        {"vuv_error_pct", &r.vuv_error_pct}};
    for (const auto& [name, iv] : items) {
      out += std::string(group) + "," + name + "," + format_double(iv->mean) + "," +
             format_double(iv->half_width) + "," + std::to_string(iv->n) + "\n";
    }
  };
  rows("high", high);
  rows("low", low);
  return out;
}

std::string report_table(const MetricReport& high, const MetricReport& low) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %-18s %-18s %-18s %-18s\n", "Originality",
                "F0 RMSE (Hz)", "LSD (dB)", "Gain RMSE (dB)", "V/UV error (%)");
  out += line;
  auto cell = [](const Interval& iv) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f +/- %.2f", iv.mean, iv.half_width);
    return std::string(buf);
  };
  for (const auto& [name, r] : {std::pair<const char*, const MetricReport*>{"High", &high},
                                {"Low", &low}}) {
    std::snprintf(line, sizeof(line), "%-12s %-18s %-18s %-18s %-18s\n", name,
                  cell(r->f0_rmse_hz).c_str(), cell(r->lsd_db).c_str(),
                  cell(r->gain_rmse_db).c_str(), cell(r->vuv_error_pct).c_str());
    out += line;
  }
  return out;
}

}  // namespace originrank
