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

#include "nbuplift/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nbuplift {
namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
constexpr std::array<const char*, 6> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Rounds a raw tick spacing to 1, 2 or 5 times a power of ten.
double NiceStep(double span, int target_ticks) {
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  const double nice = r < 1.5 ? 1 : r < 3 ? 2 : r < 7 ? 5 : 10;
  return nice * mag;
}

}  // namespace

std::string RenderBandsSvg(const std::vector<PlotSeries>& series,
                           const std::string& title,
                           const std::string& y_label, bool zero_line) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (const auto& p : s.band.points) {
      if (p.missing) continue;
      lo = std::min(lo, p.lower);
      hi = std::max(hi, p.upper);
    }
  }
  if (zero_line || !std::isfinite(lo)) {
    lo = std::min(std::isfinite(lo) ? lo : 0.0, 0.0);
    hi = std::max(std::isfinite(hi) ? hi : 0.0, 0.0);
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double q) { return kLeft + q / 100.0 * plot_w; };
  auto sy = [&](double v) { return kTop + (hi - v) / (hi - lo) * plot_h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
     << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << Num(kLeft + plot_w / 2) << "\" y=\"22\" "
     << "text-anchor=\"middle\" font-size=\"15\">" << Escape(title)
     << "</text>\n";

  // Axes and ticks.
  os << "<g stroke=\"#333\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << Num(kLeft) << "\" y1=\"" << Num(kTop + plot_h)
     << "\" x2=\"" << Num(kLeft + plot_w) << "\" y2=\"" << Num(kTop + plot_h)
     << "\"/>\n";
  os << "<line x1=\"" << Num(kLeft) << "\" y1=\"" << Num(kTop) << "\" x2=\""
     << Num(kLeft) << "\" y2=\"" << Num(kTop + plot_h) << "\"/>\n";
  os << "</g>\n";
  for (int q = 0; q <= 100; q += 10) {
    os << "<line x1=\"" << Num(sx(q)) << "\" y1=\"" << Num(kTop + plot_h)
       << "\" x2=\"" << Num(sx(q)) << "\" y2=\"" << Num(kTop + plot_h + 5)
       << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << Num(sx(q)) << "\" y=\"" << Num(kTop + plot_h + 18)
       << "\" text-anchor=\"middle\">" << q << "</text>\n";
  }
  const double step = NiceStep(hi - lo, 6);
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12; v += step) {
    const double y = sy(v);
    os << "<line x1=\"" << Num(kLeft - 5) << "\" y1=\"" << Num(y) << "\" x2=\""
       << Num(kLeft + plot_w) << "\" y2=\"" << Num(y)
       << "\" stroke=\"#ddd\"/>\n";
    char label[32];
    std::snprintf(label, sizeof(label), "%g", std::fabs(v) < step * 1e-9 ? 0.0 : v);
    os << "<text x=\"" << Num(kLeft - 8) << "\" y=\"" << Num(y + 4)
       << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  os << "<text x=\"" << Num(kLeft + plot_w / 2) << "\" y=\""
     << Num(kHeight - 15) << "\" text-anchor=\"middle\">selection percentile"
     << "</text>\n";
  os << "<text transform=\"translate(18," << Num(kTop + plot_h / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << Escape(y_label)
     << "</text>\n";
  if (zero_line) {
    os << "<line x1=\"" << Num(kLeft) << "\" y1=\"" << Num(sy(0)) << "\" x2=\""
       << Num(kLeft + plot_w) << "\" y2=\"" << Num(sy(0))
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  }

  // Each series: one polyline per contiguous run of present points.
  auto polylines = [&](const CurveBand& band, auto value, const char* color,
                       const char* dash, double width) {
    std::string pts;
    auto flush = [&] {
      if (!pts.empty()) {
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"" << width << "\" stroke-dasharray=\"" << dash
           << "\" points=\"" << pts << "\"/>\n";
        pts.clear();
      }
    };
    for (std::size_t g = 0; g < band.points.size(); ++g) {
      if (band.points[g].missing) {
        flush();
        continue;
      }
      pts += Num(sx(band.grid[g].percentile)) + "," +
             Num(sy(value(band.points[g]))) + " ";
    }
    flush();
  };

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % kPalette.size()];
    const auto& band = series[i].band;
    polylines(band, [](const BandPoint& p) { return p.median; }, color, "8,4", 2);
    polylines(band, [](const BandPoint& p) { return p.lower; }, color, "2,3", 1.2);
    polylines(band, [](const BandPoint& p) { return p.upper; }, color, "2,3", 1.2);
    const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
    const double lx = kLeft + plot_w + 15;
    os << "<line x1=\"" << Num(lx) << "\" y1=\"" << Num(ly) << "\" x2=\""
       << Num(lx + 25) << "\" y2=\"" << Num(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\" stroke-dasharray=\"8,4\"/>\n";
    os << "<text x=\"" << Num(lx + 30) << "\" y=\"" << Num(ly + 4) << "\">"
       << Escape(series[i].label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace nbuplift
