#pragma once

#include <string>
#include <vector>

namespace netinf {

// Self-contained SVG plots; no plotting service dependency.

struct ForestRow {
  std::string label;
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool group_start = false;  // draw a separator above this row
};

std::string svg_forest_plot(const std::string& title, const std::vector<ForestRow>& rows,
                            const std::string& x_label = "");

struct BarRow {
  std::string label;
  double value = 0.0;
  double lo = 0.0;   // whisker; set equal to value for none
  double hi = 0.0;
};

std::string svg_bar_chart(const std::string& title, const std::vector<BarRow>& bars,
                          const std::string& y_label = "");

// Two empirical CDF step curves on a shared axis.
std::string svg_cdf_plot(const std::string& title, const std::string& name_a,
                         std::vector<double> samples_a, const std::string& name_b,
                         std::vector<double> samples_b);

}  // namespace netinf
