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

#include "originrank/plot_svg.h"

#include <algorithm>
#include <cstdio>
#include <map>

namespace originrank {

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 320.0;
constexpr double kMargin = 40.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" " +
         "font-family=\"sans-serif\" font-size=\"13\">" + title + "</text>\n";
}

std::string legend(std::size_t slot, const std::string& name) {
  const double y = 36.0 + 14.0 * static_cast<double>(slot);
  return "<rect x=\"" + num(kWidth - 120) + "\" y=\"" + num(y - 9) +
         "\" width=\"10\" height=\"10\" fill=\"" + kPalette[slot % 4] + "\"/>\n<text x=\"" +
         num(kWidth - 105) + "\" y=\"" + num(y) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + name + "</text>\n";
}

}  // namespace

std::string histogram_svg(const Histogram& h) {
  std::string out = header("Originality density");
  double top = 0.0;
  for (const auto& c : h.classes) {
    for (double d : c.density) top = std::max(top, d);
  }
  if (top <= 0.0) top = 1.0;
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  for (std::size_t ci = 0; ci < h.classes.size(); ++ci) {
    const auto& c = h.classes[ci];
    for (int b = 0; b < h.bins; ++b) {
      const double bar_h = plot_h * c.density[static_cast<std::size_t>(b)] / top;
      out += "<rect x=\"" + num(kMargin + plot_w * h.bin_lo(b)) + "\" y=\"" +
             num(kHeight - kMargin - bar_h) + "\" width=\"" + num(plot_w * h.width) +
             "\" height=\"" + num(bar_h) + "\" fill=\"" + kPalette[ci % 4] +
             "\" fill-opacity=\"0.45\"/>\n";
    }
    out += legend(ci, c.name);
  }
  out += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kHeight - kMargin) + "\" x2=\"" +
         num(kWidth - kMargin) + "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
  out += "</svg>\n";
  return out;
}

std::string scatter_svg(const Projection2D& projection, std::span<const std::string> labels) {
  std::string out = header(std::string(projection_name(projection.method)) + " projection");
  const auto& pts = projection.points;
  if (pts.rows() == 0) return out + "</svg>\n";
  const double x0 = pts.col(0).minCoeff();
  const double x1 = pts.col(0).maxCoeff();
  const double y0 = pts.col(1).minCoeff();
  const double y1 = pts.col(1).maxCoeff();
  const double sx = x1 > x0 ? (kWidth - 2 * kMargin) / (x1 - x0) : 0.0;
  const double sy = y1 > y0 ? (kHeight - 2 * kMargin) / (y1 - y0) : 0.0;
  std::map<std::string, std::size_t> slots;
  for (const auto& l : labels) slots.emplace(l, slots.size());
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const std::size_t slot = slots[labels[static_cast<std::size_t>(i)]];
    out += "<circle cx=\"" + num(kMargin + (pts(i, 0) - x0) * sx) + "\" cy=\"" +
           num(kHeight - kMargin - (pts(i, 1) - y0) * sy) + "\" r=\"2.5\" fill=\"" +
           kPalette[slot % 4] + "\" fill-opacity=\"0.7\"/>\n";
  }
  for (const auto& [name, slot] : slots) out += legend(slot, name);
  out += "</svg>\n";
  return out;
}

}  // namespace originrank
