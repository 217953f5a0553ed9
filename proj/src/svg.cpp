#include "camwatch/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

namespace camwatch::svg {
namespace {

constexpr double kWidth = 800, kHeight = 400;
constexpr double kLeft = 60, kRight = 20, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string header(const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">{3}</text>\n",
      kWidth, kHeight, kWidth / 2, escape(title));
}

double nice_max(double v) {
  if (v <= 0) return 1;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (v <= m * mag) return m * mag;
  }
  return 10 * mag;
}

std::string axes(double y_max) {
  std::string out = fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{2}\" x2=\"{3}\" y2=\"{2}\" stroke=\"black\"/>\n",
      kLeft, kTop, kHeight - kBottom, kWidth - kRight);
  for (int k = 0; k <= 4; ++k) {
    const double v = y_max * k / 4;
    const double y = kHeight - kBottom - (kHeight - kTop - kBottom) * k / 4;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:g}</text>\n", kLeft - 4, y + 4, v);
  }
  return out;
}

}  // namespace

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string line_plot(const std::string& title, const std::vector<std::string>& x_labels, const std::vector<Series>& series) {
  double y_max = 0;
  for (const auto& s : series) {
    for (double v : s.values) y_max = std::max(y_max, v);
  }
  y_max = nice_max(y_max);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const std::size_t n = x_labels.size();
  auto x_at = [&](std::size_t i) { return kLeft + (n <= 1 ? plot_w / 2 : plot_w * static_cast<double>(i) / static_cast<double>(n - 1)); };
  auto y_at = [&](double v) { return kHeight - kBottom - plot_h * v / y_max; };

  std::string out = header(title) + axes(y_max);
  const std::size_t step = std::max<std::size_t>(1, n / 10);
  for (std::size_t i = 0; i < n; i += step) {
    out += fmt::format("<text x=\"{0:.1f}\" y=\"{1:.1f}\" text-anchor=\"end\" transform=\"rotate(-45 {0:.1f} {1:.1f})\">{2}</text>\n",
                       x_at(i), kHeight - kBottom + 14, escape(x_labels[i]));
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    std::string pts;
    for (std::size_t i = 0; i < ser.values.size() && i < n; ++i) {
      pts += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", x_at(i), y_at(ser.values[i]));
    }
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", ser.color, pts);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" fill=\"{}\">{}</text>\n", kWidth - kRight - 120, kTop + 14.0 * (s + 1),
                       ser.color, escape(ser.name));
  }
  out += "</svg>\n";
  return out;
}

std::string scatter_plot(const std::string& title, const std::string& x_name, const std::string& y_name,
                         const std::vector<ScatterPoint>& points) {
  double x_max = 0, y_max = 0;
  for (const auto& p : points) {
    x_max = std::max(x_max, p.x);
    y_max = std::max(y_max, p.y);
  }
  x_max = nice_max(x_max);
  y_max = nice_max(y_max);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  std::map<std::string, std::string> colors;
  for (const auto& p : points) colors.emplace(p.group, "");
  std::size_t c = 0;
  for (auto& [g, col] : colors) col = kPalette[c++ % std::size(kPalette)];

  std::string out = header(title) + axes(y_max);
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", kLeft + plot_w / 2, kHeight - 20,
                     escape(x_name));
  out += fmt::format("<text x=\"14\" y=\"{:.1f}\" transform=\"rotate(-90 14 {:.1f})\" text-anchor=\"middle\">{}</text>\n",
                     kTop + plot_h / 2, kTop + plot_h / 2, escape(y_name));
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:g}</text>\n", kWidth - kRight, kHeight - kBottom + 14, x_max);
  for (const auto& p : points) {
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", kLeft + plot_w * p.x / x_max,
                       kHeight - kBottom - plot_h * p.y / y_max, colors[p.group]);
  }
  std::size_t row = 0;
  for (const auto& [g, col] : colors) {
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" fill=\"{}\">{}</text>\n", kWidth - kRight - 120, kTop + 14.0 * (++row), col,
                       escape(g.empty() ? "(no phase)" : g));
  }
  out += "</svg>\n";
  return out;
}

std::string bar_chart(const std::string& title, const std::vector<std::string>& labels, const std::vector<double>& values) {
  double y_max = 0;
  for (double v : values) y_max = std::max(y_max, v);
  y_max = nice_max(y_max);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double slot = values.empty() ? plot_w : plot_w / static_cast<double>(values.size());
  std::string out = header(title) + axes(y_max);
  const std::size_t step = std::max<std::size_t>(1, values.size() / 15);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double h = plot_h * values[i] / y_max;
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n", kLeft + slot * i + 1,
                       kHeight - kBottom - h, std::max(1.0, slot - 2), h, kPalette[0]);
    if (i % step == 0 && i < labels.size()) {
      out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", kLeft + slot * (i + 0.5),
                         kHeight - kBottom + 14, escape(labels[i]));
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace camwatch::svg
