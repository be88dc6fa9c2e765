#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace rewardlab::report {

struct Series {
  std::string name;
  std::vector<double> mean;
  std::vector<double> std;  // band is mean +/- std
};

namespace detail {

inline std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

inline std::string escape_xml(const std::string& s) {
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

// Round step (1, 2 or 5 times a power of ten) giving about `target` ticks.
inline double nice_step(double span, int target) {
  const double raw = span / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace detail

// Static line chart with shaded +/- std bands. Output depends only on the inputs.
inline std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<Series>& series) {
  using detail::fmt;
  constexpr double W = 720, H = 440, left = 70, right = 200, top = 40, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;
  std::size_t max_len = 1;
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const auto& s : series) {
    max_len = std::max(max_len, s.mean.size());
    for (std::size_t i = 0; i < s.mean.size(); ++i) {
      const double sd = i < s.std.size() ? s.std[i] : 0.0;
      if (first) lo = hi = s.mean[i], first = false;
      lo = std::min(lo, s.mean[i] - sd);
      hi = std::max(hi, s.mean[i] + sd);
    }
  }
  if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;
  const double ystep = detail::nice_step(hi - lo, 5);
  lo = std::floor(lo / ystep) * ystep;
  hi = std::ceil(hi / ystep) * ystep;
  const double xmax = static_cast<double>(std::max<std::size_t>(max_len, 2) - 1);
  auto X = [&](double i) { return left + pw * i / xmax; };
  auto Y = [&](double v) { return top + ph * (1.0 - (v - lo) / (hi - lo)); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"440\" viewBox=\"0 0 720 440\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"720\" height=\"440\" fill=\"white\"/>\n";
  out += "<text x=\"" + fmt("%.1f", left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         detail::escape_xml(title) + "</text>\n";
  // Grid and ticks.
  for (double v = lo; v <= hi + ystep * 1e-6; v += ystep) {
    const std::string y = fmt("%.2f", Y(v));
    out += "<line x1=\"" + fmt("%.2f", left) + "\" y1=\"" + y + "\" x2=\"" + fmt("%.2f", left + pw) + "\" y2=\"" + y +
           "\" stroke=\"#e0e0e0\"/>\n";
    out += "<text x=\"" + fmt("%.2f", left - 6) + "\" y=\"" + y + "\" text-anchor=\"end\" dominant-baseline=\"middle\">" +
           fmt("%g", std::abs(v) < ystep * 1e-6 ? 0.0 : v) + "</text>\n";
  }
  const double xstep = detail::nice_step(xmax, 6);
  for (double v = 0; v <= xmax + 1e-9; v += xstep) {
    const std::string x = fmt("%.2f", X(v));
    out += "<line x1=\"" + x + "\" y1=\"" + fmt("%.2f", top + ph) + "\" x2=\"" + x + "\" y2=\"" +
           fmt("%.2f", top + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + x + "\" y=\"" + fmt("%.2f", top + ph + 18) + "\" text-anchor=\"middle\">" + fmt("%g", v) +
           "</text>\n";
  }
  out += "<rect x=\"" + fmt("%.2f", left) + "\" y=\"" + fmt("%.2f", top) + "\" width=\"" + fmt("%.2f", pw) +
         "\" height=\"" + fmt("%.2f", ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "<text x=\"" + fmt("%.1f", left + pw / 2) + "\" y=\"" + fmt("%.1f", H - 12) + "\" text-anchor=\"middle\">" +
         detail::escape_xml(x_label) + "</text>\n";
  out += "<text transform=\"translate(18 " + fmt("%.1f", top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         detail::escape_xml(y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string color = detail::kPalette[k % std::size(detail::kPalette)];
    if (s.mean.empty()) continue;
    // Thin long curves to at most ~600 points so files stay small.
    const std::size_t stride = std::max<std::size_t>(1, s.mean.size() / 600);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.mean.size(); i += stride) idx.push_back(i);
    if (idx.back() != s.mean.size() - 1) idx.push_back(s.mean.size() - 1);
    std::string band, line;
    for (std::size_t i : idx) {
      const double sd = i < s.std.size() ? s.std[i] : 0.0;
      band += fmt("%.2f", X(static_cast<double>(i))) + "," + fmt("%.2f", Y(s.mean[i] + sd)) + " ";
      line += fmt("%.2f", X(static_cast<double>(i))) + "," + fmt("%.2f", Y(s.mean[i])) + " ";
    }
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
      const double sd = *it < s.std.size() ? s.std[*it] : 0.0;
      band += fmt("%.2f", X(static_cast<double>(*it))) + "," + fmt("%.2f", Y(s.mean[*it] - sd)) + " ";
    }
    band.pop_back();
    line.pop_back();
    out += "<polygon points=\"" + band + "\" fill=\"" + color + "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
    out += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.6\"/>\n";
    const double ly = top + 12 + 18.0 * static_cast<double>(k);
    out += "<line x1=\"" + fmt("%.1f", left + pw + 12) + "\" y1=\"" + fmt("%.1f", ly) + "\" x2=\"" +
           fmt("%.1f", left + pw + 32) + "\" y2=\"" + fmt("%.1f", ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"3\"/>\n";
    out += "<text x=\"" + fmt("%.1f", left + pw + 38) + "\" y=\"" + fmt("%.1f", ly) +
           "\" dominant-baseline=\"middle\" font-size=\"11\">" + detail::escape_xml(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace rewardlab::report
