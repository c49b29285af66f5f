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

#ifndef ORIGINRANK_PLOT_SVG_H_
#define ORIGINRANK_PLOT_SVG_H_

#include <span>
#include <string>

#include "originrank/histogram.h"
#include "originrank/projection.h"

namespace originrank {

// Self-contained SVG renderings of the CSV artifacts.
std::string histogram_svg(const Histogram& h);
std::string scatter_svg(const Projection2D& projection, std::span<const std::string> labels);

}  // namespace originrank

#endif  // ORIGINRANK_PLOT_SVG_H_
