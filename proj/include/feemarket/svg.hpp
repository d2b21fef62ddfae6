//------------------------------------------------------------------------------
//
//   Copyright 2026 The feemarket Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include "feemarket/format.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace feemarket {

struct PlotSeries
{
  std::string                           name;
  std::vector<std::pair<double, double>> points;
};

/// Minimal self-contained SVG line chart. Non-finite points are skipped.
struct LinePlot
{
  std::string             title;
  std::string             x_label;
  std::string             y_label;
  bool                    log_x{false};
  std::vector<PlotSeries> series;

  std::string Render() const
  {
    constexpr double kWidth  = 720.0;
    constexpr double kHeight = 440.0;
    constexpr double kLeft   = 80.0;
    constexpr double kRight  = 170.0;
    constexpr double kTop    = 40.0;
    constexpr double kBottom = 60.0;
    static constexpr std::array<char const *, 8> kColors = {
        "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    double y_min = 0.0;
    double y_max = -x_min;
    for (auto const &s : series)
    {
      for (auto const &[x, y] : s.points)
      {
        if (!Usable(x, y))
        {
          continue;
        }
        double const tx = MapX(x);
        x_min           = std::min(x_min, tx);
        x_max           = std::max(x_max, tx);
        y_min           = std::min(y_min, y);
        y_max           = std::max(y_max, y);
      }
    }
    if (!std::isfinite(x_min))
    {
      x_min = 0.0;
      x_max = 1.0;
      y_max = 1.0;
    }
    if (x_max == x_min)
    {
      x_max = x_min + 1.0;
    }
    if (!(y_max > y_min))
    {
      y_max = y_min + 1.0;
    }
    double const plot_w = kWidth - kLeft - kRight;
    double const plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (MapX(x) - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return kTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << Escape(title) << "</text>\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kTop + plot_h << "\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i)
    {
      double const fy = y_min + (y_max - y_min) * i / 4.0;
      double const yy = py(fy);
      svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << FormatFixed(yy, 1) << "\" x2=\""
          << kLeft << "\" y2=\"" << FormatFixed(yy, 1) << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << FormatFixed(yy + 4, 1)
          << "\" text-anchor=\"end\">" << FormatShort(fy) << "</text>\n";

      double const fx = x_min + (x_max - x_min) * i / 4.0;
      double const xx = kLeft + plot_w * i / 4.0;
      double const label = log_x ? std::pow(10.0, fx) : fx;
      svg << "<text x=\"" << FormatFixed(xx, 1) << "\" y=\"" << kTop + plot_h + 18
          << "\" text-anchor=\"middle\">" << FormatShort(label) << "</text>\n";
    }
    svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"middle\">" << Escape(x_label) << (log_x ? " (log scale)" : "")
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">" << Escape(y_label)
        << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s)
    {
      char const *color = kColors[s % kColors.size()];
      std::string path;
      for (auto const &[x, y] : series[s].points)
      {
        if (!Usable(x, y))
        {
          continue;
        }
        path += (path.empty() ? "" : " ") + FormatFixed(px(x), 1) + "," + FormatFixed(py(y), 1);
        svg << "<circle cx=\"" << FormatFixed(px(x), 1) << "\" cy=\"" << FormatFixed(py(y), 1)
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
      if (!path.empty())
      {
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
            << path << "\"/>\n";
      }
      double const ly = kTop + 14.0 + 18.0 * static_cast<double>(s);
      svg << "<line x1=\"" << kWidth - kRight + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
          << kWidth - kRight + 32 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << kWidth - kRight + 38 << "\" y=\"" << ly << "\">"
          << Escape(series[s].name) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
  }

private:
  bool Usable(double x, double y) const
  {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0.0);
  }

  double MapX(double x) const
  {
    return log_x ? std::log10(x) : x;
  }

  static std::string Escape(std::string const &text)
  {
    std::string out;
    for (char c : text)
    {
      switch (c)
      {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
      }
    }
    return out;
  }
};

}  // namespace feemarket
