#pragma once
// Minimal SVG emission for the two report figures: RMSE-vs-time curves and
// per-trial ATE boxplots. Everything is drawn from the summary JSON document,
// never from recomputed estimates, so deleting the plots and re-rendering
// cannot change any number.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nanol/error.hpp"

namespace nanol {

namespace svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline const char* series_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#8c564b", "#e377c2"};
  return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

struct Frame {
  double width = 640.0, height = 400.0;
  double left = 60.0, right = 20.0, top = 30.0, bottom = 45.0;
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;

  double x(double v) const {
    return left + (v - x_min) / (x_max - x_min) * (width - left - right);
  }
  double y(double v) const {
    return height - bottom -
           (v - y_min) / (y_max - y_min) * (height - top - bottom);
  }
};

inline void open_document(std::string* out, const Frame& f,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label) {
  *out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
          num(f.width) + "\" height=\"" + num(f.height) + "\">\n";
  *out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  *out += "<text x=\"" + num(f.width / 2) +
          "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" + title +
          "</text>\n";
  *out += "<text x=\"" + num(f.width / 2) + "\" y=\"" + num(f.height - 8) +
          "\" text-anchor=\"middle\" font-size=\"12\">" + x_label +
          "</text>\n";
  *out += "<text x=\"14\" y=\"" + num(f.height / 2) +
          "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 "
          "14 " +
          num(f.height / 2) + ")\">" + y_label + "</text>\n";
  // Axes with simple min/max tick labels; a full tick engine buys nothing
  // for a generated report figure.
  *out += "<rect x=\"" + num(f.left) + "\" y=\"" + num(f.top) + "\" width=\"" +
          num(f.width - f.left - f.right) + "\" height=\"" +
          num(f.height - f.top - f.bottom) +
          "\" fill=\"none\" stroke=\"black\"/>\n";
  *out += "<text x=\"" + num(f.left) + "\" y=\"" + num(f.height - f.bottom + 16) +
          "\" font-size=\"11\">" + num(f.x_min) + "</text>\n";
  *out += "<text x=\"" + num(f.width - f.right) + "\" y=\"" +
          num(f.height - f.bottom + 16) +
          "\" text-anchor=\"end\" font-size=\"11\">" + num(f.x_max) +
          "</text>\n";
  *out += "<text x=\"" + num(f.left - 4) + "\" y=\"" +
          num(f.height - f.bottom) +
          "\" text-anchor=\"end\" font-size=\"11\">" + num(f.y_min) +
          "</text>\n";
  *out += "<text x=\"" + num(f.left - 4) + "\" y=\"" + num(f.top + 10) +
          "\" text-anchor=\"end\" font-size=\"11\">" + num(f.y_max) +
          "</text>\n";
}

}  // namespace svg

inline std::string render_rmse_curves(const nlohmann::json& summary,
                                      const std::string& channel,
                                      const std::string& title,
                                      const std::string& y_label) {
  const auto& t = summary.at("t");
  svg::Frame f;
  f.x_min = t.front().get<double>();
  f.x_max = t.back().get<double>();
  f.y_min = 0.0;
  f.y_max = 1e-12;
  const auto& rmse = summary.at("rmse");
  for (const auto& item : rmse.items()) {
    for (const auto& v : item.value().at(channel)) {
      f.y_max = std::max(f.y_max, v.get<double>());
    }
  }
  f.y_max *= 1.05;

  std::string out;
  svg::open_document(&out, f, title, "time [s]", y_label);
  std::size_t idx = 0;
  double legend_y = f.top + 14.0;
  for (const auto& item : rmse.items()) {
    const auto& series = item.value().at(channel);
    std::string pts;
    for (std::size_t k = 0; k < series.size(); ++k) {
      pts += svg::num(f.x(t[k].get<double>())) + "," +
             svg::num(f.y(series[k].get<double>())) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" +
           std::string(svg::series_color(idx)) + "\" stroke-width=\"1.5\" "
           "points=\"" + pts + "\"/>\n";
    out += "<text x=\"" + svg::num(f.width - f.right - 90.0) + "\" y=\"" +
           svg::num(legend_y) + "\" font-size=\"12\" fill=\"" +
           svg::series_color(idx) + "\">" + item.key() + "</text>\n";
    legend_y += 16.0;
    ++idx;
  }
  out += "</svg>\n";
  return out;
}

inline std::string render_ate_boxplot(const nlohmann::json& summary,
                                      const std::string& field,
                                      const std::string& title,
                                      const std::string& y_label) {
  const auto& per_trial = summary.at("per_trial");
  svg::Frame f;
  f.x_min = 0.0;
  f.x_max = static_cast<double>(per_trial.size());
  f.y_min = 0.0;
  f.y_max = 1e-12;
  for (const auto& item : per_trial.items()) {
    for (const auto& v : item.value().at(field)) {
      f.y_max = std::max(f.y_max, v.get<double>());
    }
  }
  f.y_max *= 1.05;

  std::string out;
  svg::open_document(&out, f, title, "", y_label);
  std::size_t idx = 0;
  for (const auto& item : per_trial.items()) {
    std::vector<double> v;
    for (const auto& x : item.value().at(field)) v.push_back(x.get<double>());
    std::sort(v.begin(), v.end());
    if (v.empty()) continue;
    auto quantile = [&](double q) {
      const double pos = q * static_cast<double>(v.size() - 1);
      const auto lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, v.size() - 1);
      return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    const double center = f.x(static_cast<double>(idx) + 0.5);
    const double half_width = 28.0;
    const double q1 = quantile(0.25), q2 = quantile(0.5), q3 = quantile(0.75);
    const char* color = svg::series_color(idx);
    out += "<line x1=\"" + svg::num(center) + "\" y1=\"" +
           svg::num(f.y(v.front())) + "\" x2=\"" + svg::num(center) +
           "\" y2=\"" + svg::num(f.y(v.back())) + "\" stroke=\"black\"/>\n";
    out += "<rect x=\"" + svg::num(center - half_width) + "\" y=\"" +
           svg::num(f.y(q3)) + "\" width=\"" + svg::num(2 * half_width) +
           "\" height=\"" + svg::num(f.y(q1) - f.y(q3)) + "\" fill=\"" +
           color + "\" fill-opacity=\"0.4\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + svg::num(center - half_width) + "\" y1=\"" +
           svg::num(f.y(q2)) + "\" x2=\"" + svg::num(center + half_width) +
           "\" y2=\"" + svg::num(f.y(q2)) +
           "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + svg::num(center) + "\" y=\"" +
           svg::num(f.height - f.bottom + 16) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + item.key() +
           "</text>\n";
    ++idx;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace nanol
