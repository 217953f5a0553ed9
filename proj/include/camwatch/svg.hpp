#pragma once

#include <string>
#include <vector>

namespace camwatch::svg {

struct Series {
  std::string name;
  std::string color;
  std::vector<double> values;  // one per x label
};

std::string line_plot(const std::string& title, const std::vector<std::string>& x_labels, const std::vector<Series>& series);

struct ScatterPoint {
  double x = 0, y = 0;
  std::string group;
};

std::string scatter_plot(const std::string& title, const std::string& x_name, const std::string& y_name,
                         const std::vector<ScatterPoint>& points);

std::string bar_chart(const std::string& title, const std::vector<std::string>& labels, const std::vector<double>& values);

std::string escape(const std::string& text);

}  // namespace camwatch::svg
