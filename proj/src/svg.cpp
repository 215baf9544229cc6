#include "netinf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace netinf {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Axis {
  double lo, hi;
  double tick;
};

// round the range out to pleasant tick positions
Axis nice_axis(double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  if (lo == hi) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double tick = mag;
  if (raw / mag >= 5.0) {
    tick = 5.0 * mag;
  } else if (raw / mag >= 2.0) {
    tick = 2.0 * mag;
  }
  return {std::floor(lo / tick) * tick, std::ceil(hi / tick) * tick, tick};
}

std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" viewBox=\"0 0 " + num(w) + " " + num(h) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string line(double x1, double y1, double x2, double y2, const std::string& stroke,
                 double width = 1.0, const std::string& extra = "") {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
         num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"" + extra +
         "/>\n";
}

std::string text(double x, double y, const std::string& s, const std::string& anchor = "start",
                 const std::string& extra = "") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\"" + extra +
         ">" + escape(s) + "</text>\n";
}

}  // namespace

std::string svg_forest_plot(const std::string& title, const std::vector<ForestRow>& rows,
                            const std::string& x_label) {
  const double row_h = 24.0;
  const double top = 48.0, bottom = 52.0, left = 230.0, right = 30.0;
  const double plot_w = 420.0;
  const double w = left + plot_w + right;
  const double h = top + row_h * static_cast<double>(rows.size()) + bottom;

  double lo = 0.0, hi = 0.0;  // include zero in the axis
  for (const ForestRow& r : rows) {
    lo = std::min({lo, r.lo, r.estimate});
    hi = std::max({hi, r.hi, r.estimate});
  }
  const Axis ax = nice_axis(lo, hi);
  auto px = [&](double v) { return left + (v - ax.lo) / (ax.hi - ax.lo) * plot_w; };

  std::string svg = header(w, h);
  svg += text(w / 2.0, 24.0, title, "middle", " font-size=\"14\" font-weight=\"bold\"");
  const double y0 = top, y1 = top + row_h * static_cast<double>(rows.size());
  for (double v = ax.lo; v <= ax.hi + ax.tick / 2.0; v += ax.tick) {
    svg += line(px(v), y1, px(v), y1 + 4.0, "black");
    svg += text(px(v), y1 + 18.0, num(v), "middle");
    svg += line(px(v), y0, px(v), y1, "#e0e0e0");
  }
  if (ax.lo < 0.0 && ax.hi > 0.0) svg += line(px(0.0), y0, px(0.0), y1, "#888", 1.0);
  if (!x_label.empty()) svg += text(left + plot_w / 2.0, y1 + 38.0, x_label, "middle");

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ForestRow& r = rows[i];
    const double y = top + row_h * (static_cast<double>(i) + 0.5);
    if (r.group_start && i > 0) {
      svg += line(10.0, y - row_h / 2.0, w - 10.0, y - row_h / 2.0, "#cccccc");
    }
    svg += text(left - 10.0, y + 4.0, r.label, "end");
    svg += line(px(r.lo), y, px(r.hi), y, "#1f5fa6", 2.0);
    svg += line(px(r.lo), y - 4.0, px(r.lo), y + 4.0, "#1f5fa6", 2.0);
    svg += line(px(r.hi), y - 4.0, px(r.hi), y + 4.0, "#1f5fa6", 2.0);
    svg += "<circle cx=\"" + num(px(r.estimate)) + "\" cy=\"" + num(y) +
           "\" r=\"3.5\" fill=\"#d62728\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string svg_bar_chart(const std::string& title, const std::vector<BarRow>& bars,
                          const std::string& y_label) {
  const double top = 48.0, bottom = 46.0, left = 70.0, right = 20.0;
  const double bar_w = 64.0, gap = 26.0;
  const double plot_h = 260.0;
  const double w = left + (bar_w + gap) * static_cast<double>(bars.size()) + right;
  const double h = top + plot_h + bottom;

  double lo = 0.0, hi = 0.0;
  for (const BarRow& b : bars) {
    lo = std::min({lo, b.value, b.lo});
    hi = std::max({hi, b.value, b.hi});
  }
  const Axis ax = nice_axis(lo, hi);
  auto py = [&](double v) { return top + (ax.hi - v) / (ax.hi - ax.lo) * plot_h; };

  std::string svg = header(w, h);
  svg += text(w / 2.0, 24.0, title, "middle", " font-size=\"14\" font-weight=\"bold\"");
  for (double v = ax.lo; v <= ax.hi + ax.tick / 2.0; v += ax.tick) {
    svg += line(left - 4.0, py(v), left, py(v), "black");
    svg += text(left - 8.0, py(v) + 4.0, num(v), "end");
    svg += line(left, py(v), w - right, py(v), "#e0e0e0");
  }
  if (!y_label.empty()) {
    svg += "<text x=\"16\" y=\"" + num(top + plot_h / 2.0) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + num(top + plot_h / 2.0) +
           ")\">" + escape(y_label) + "</text>\n";
  }
  svg += line(left, py(0.0), w - right, py(0.0), "black");

  for (std::size_t i = 0; i < bars.size(); ++i) {
    const BarRow& b = bars[i];
    const double x = left + gap / 2.0 + (bar_w + gap) * static_cast<double>(i);
    const double y_val = py(b.value), y_zero = py(0.0);
    svg += "<rect x=\"" + num(x) + "\" y=\"" + num(std::min(y_val, y_zero)) + "\" width=\"" +
           num(bar_w) + "\" height=\"" + num(std::fabs(y_zero - y_val)) +
           "\" fill=\"#1f5fa6\" fill-opacity=\"0.8\"/>\n";
    if (b.hi != b.lo) {
      const double cx = x + bar_w / 2.0;
      svg += line(cx, py(b.lo), cx, py(b.hi), "black", 1.5);
      svg += line(cx - 5.0, py(b.lo), cx + 5.0, py(b.lo), "black", 1.5);
      svg += line(cx - 5.0, py(b.hi), cx + 5.0, py(b.hi), "black", 1.5);
    }
    svg += text(x + bar_w / 2.0, top + plot_h + 18.0, b.label, "middle");
  }
  svg += "</svg>\n";
  return svg;
}

std::string svg_cdf_plot(const std::string& title, const std::string& name_a,
                         std::vector<double> samples_a, const std::string& name_b,
                         std::vector<double> samples_b) {
  const double top = 48.0, bottom = 46.0, left = 60.0, right = 24.0;
  const double plot_w = 440.0, plot_h = 280.0;
  const double w = left + plot_w + right, h = top + plot_h + bottom;

  std::sort(samples_a.begin(), samples_a.end());
  std::sort(samples_b.begin(), samples_b.end());
  double xmax = 0.0;
  if (!samples_a.empty()) xmax = std::max(xmax, samples_a.back());
  if (!samples_b.empty()) xmax = std::max(xmax, samples_b.back());
  if (xmax <= 0.0) xmax = 1.0;

  auto px = [&](double v) { return left + v / xmax * plot_w; };
  auto py = [&](double f) { return top + (1.0 - f) * plot_h; };

  auto curve = [&](const std::vector<double>& s, const std::string& color) {
    std::string path = "<path d=\"M" + num(px(0.0)) + " " + num(py(0.0));
    const double n = static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double f = static_cast<double>(i + 1) / n;
      path += " L" + num(px(s[i])) + " " + num(py(static_cast<double>(i) / n));
      path += " L" + num(px(s[i])) + " " + num(py(f));
    }
    path += " L" + num(px(xmax)) + " " + num(py(1.0));
    path += "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    return path;
  };

  std::string svg = header(w, h);
  svg += text(w / 2.0, 24.0, title, "middle", " font-size=\"14\" font-weight=\"bold\"");
  for (int t = 0; t <= 5; ++t) {
    const double f = static_cast<double>(t) / 5.0;
    svg += line(left - 4.0, py(f), left, py(f), "black");
    svg += text(left - 8.0, py(f) + 4.0, num(f), "end");
    svg += line(left, py(f), left + plot_w, py(f), "#e0e0e0");
  }
  const Axis ax = nice_axis(0.0, xmax);
  for (double v = 0.0; v <= xmax + ax.tick / 2.0; v += ax.tick) {
    svg += line(px(v), top + plot_h, px(v), top + plot_h + 4.0, "black");
    svg += text(px(v), top + plot_h + 18.0, num(v), "middle");
  }
  svg += text(left + plot_w / 2.0, h - 10.0, "distance", "middle");
  svg += curve(samples_a, "#d62728");
  svg += curve(samples_b, "#1f5fa6");
  svg += line(left + plot_w - 150.0, top + 14.0, left + plot_w - 120.0, top + 14.0, "#d62728", 2.0);
  svg += text(left + plot_w - 114.0, top + 18.0, name_a);
  svg += line(left + plot_w - 150.0, top + 32.0, left + plot_w - 120.0, top + 32.0, "#1f5fa6", 2.0);
  svg += text(left + plot_w - 114.0, top + 36.0, name_b);
  svg += "</svg>\n";
  return svg;
}

}  // namespace netinf
