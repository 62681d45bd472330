// Copyright 2026 The dynmatch Authors
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

#include "dynmatch/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace dynmatch::svg {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void header(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << escape(title) << "</text>\n";
}

void axes(std::ostringstream& out, double x0, double x1, double y0, double y1,
          const std::string& x_label, const std::string& y_label) {
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = i / 4.0;
    const double px = kLeft + fx * pw;
    const double py = kTop + ph - fx * ph;
    out << "<text x=\"" << num(px) << "\" y=\"" << num(kTop + ph + 16)
        << "\" text-anchor=\"middle\">" << tick(x0 + fx * (x1 - x0))
        << "</text>\n";
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py + 4)
        << "\" text-anchor=\"end\">" << tick(y0 + fx * (y1 - y0))
        << "</text>\n";
    out << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\""
        << num(py) << "\" y2=\"" << num(py)
        << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
  }
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label)
      << "</text>\n";
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label,
                       std::span<const Series> series) {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const Series& s : series) {
    for (double v : s.x) {
      x0 = std::min(x0, v);
      x1 = std::max(x1, v);
    }
    for (double v : s.y) {
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1;
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  std::ostringstream out;
  header(out, title);
  axes(out, x0, x1, y0, y1, x_label, y_label);
  for (size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double px = kLeft + (s.x[i] - x0) / (x1 - x0) * pw;
      const double py = kTop + ph - (s.y[i] - y0) / (y1 - y0) * ph;
      out << num(px) << ',' << num(py) << ' ';
    }
    out << "\"/>\n";
    const double ly = kTop + 14 + 18.0 * k;
    out << "<line x1=\"" << kWidth - kRight + 10 << "\" x2=\""
        << kWidth - kRight + 30 << "\" y1=\"" << num(ly - 4) << "\" y2=\""
        << num(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kRight + 36 << "\" y=\"" << num(ly)
        << "\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string bar_chart(const std::string& title, const std::string& y_label,
                      std::span<const std::pair<std::string, double>> bars) {
  double y1 = 0.0;
  for (const auto& [label, v] : bars) y1 = std::max(y1, v);
  if (y1 <= 0.0) y1 = 1.0;
  y1 *= 1.1;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  std::ostringstream out;
  header(out, title);
  axes(out, 0, static_cast<double>(bars.size()), 0, y1, "", y_label);
  const double slot = pw / std::max<size_t>(1, bars.size());
  for (size_t k = 0; k < bars.size(); ++k) {
    const double h = bars[k].second / y1 * ph;
    const double x = kLeft + k * slot + slot * 0.15;
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(kTop + ph - h)
        << "\" width=\"" << num(slot * 0.7) << "\" height=\"" << num(h)
        << "\" fill=\"" << kPalette[k % std::size(kPalette)] << "\"/>\n";
    out << "<text x=\"" << num(x + slot * 0.35) << "\" y=\""
        << num(kTop + ph - h - 4) << "\" text-anchor=\"middle\">"
        << tick(bars[k].second) << "</text>\n";
    out << "<text x=\"" << num(x + slot * 0.35) << "\" y=\""
        << num(kTop + ph + 32) << "\" text-anchor=\"middle\">"
        << escape(bars[k].first) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

Figures figures(std::span<const sim::ReplayResult> runs, int smooth_width) {
  Figures f;
  std::vector<std::pair<std::string, double>> bars;
  std::vector<Series> match, priced, cumulative;
  for (const sim::ReplayResult& r : runs) {
    bars.push_back({r.policy, r.total_employment});
    Series m{r.policy, {}, {}};
    Series p{r.policy, {}, {}};
    Series c{r.policy, {}, {}};
    std::vector<double> per_refugee;
    for (const sim::ArrivalRecord& a : r.per_arrival) {
      const double x = static_cast<double>(a.refugees_so_far);
      m.x.push_back(x);
      p.x.push_back(x);
      c.x.push_back(x);
      per_refugee.push_back(a.match_score_per_refugee);
      p.y.push_back(a.priced_capacity);
      c.y.push_back(a.cumulative_employment);
    }
    m.y = sim::triangle_smooth(per_refugee, smooth_width);
    match.push_back(std::move(m));
    priced.push_back(std::move(p));
    cumulative.push_back(std::move(c));
  }
  f.employment = bar_chart("Total employment", "employment", bars);
  f.match_score = line_chart("Smoothed match score per refugee",
                             "refugees arrived", "match score", match);
  f.priced_capacity = line_chart("Remaining priced capacity",
                                 "refugees arrived", "fraction", priced);
  f.cumulative = line_chart("Cumulative employment", "refugees arrived",
                            "employment", cumulative);
  return f;
}

}  // namespace dynmatch::svg
