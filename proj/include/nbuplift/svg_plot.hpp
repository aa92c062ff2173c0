// Copyright 2026 The nbuplift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NBUPLIFT_SVG_PLOT_HPP_
#define NBUPLIFT_SVG_PLOT_HPP_

#include <string>
#include <vector>

#include "nbuplift/curve.hpp"

namespace nbuplift {

struct PlotSeries {
  std::string label;
  CurveBand band;
};

// Static SVG: point estimates dashed, band limits dotted, one colour per
// series, x axis = selection percentile. Missing points break the lines.
// `zero_line` adds a solid horizontal reference at y = 0.
std::string RenderBandsSvg(const std::vector<PlotSeries>& series,
                           const std::string& title,
                           const std::string& y_label, bool zero_line);

}  // namespace nbuplift

#endif  // NBUPLIFT_SVG_PLOT_HPP_
