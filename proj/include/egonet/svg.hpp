#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

// Dependency-free SVG charts. Coordinates are printed with 6 significant
// digits so output is stable enough for golden-file comparison.
namespace egonet::svg {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::fabs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

inline const char* color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[i % 10];
}

struct Frame {
  double width = 640, height = 400;
  double left = 70, right = 20, top = 40, bottom = 60;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

class Canvas {
 public:
  explicit Canvas(const Frame& f, const std::string& title) : f_(f) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(f.width) << "\" height=\"" << fmt(f.height)
         << "\" viewBox=\"0 0 " << fmt(f.width) << ' ' << fmt(f.height) << "\">\n";
    out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(f.width / 2, 24, title, 16, "middle");
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double w = 1,
            const std::string& dash = {}) {
    out_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2) << "\" y2=\"" << fmt(y2)
         << "\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(w) << '"';
    if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << '"';
    out_ << "/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    out_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
         << "\" fill=\"" << fill << "\"/>\n";
  }

  void circle(double x, double y, double r, const std::string& fill) {
    out_ << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"" << fmt(r) << "\" fill=\"" << fill
         << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
    out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) out_ << (i ? " " : "") << fmt(pts[i].first) << ',' << fmt(pts[i].second);
    out_ << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 12, const char* anchor = "start") {
    out_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"sans-serif\" font-size=\"" << size
         << "\" text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
  }

  void axes(const std::string& xlabel, const std::string& ylabel) {
    line(f_.left, f_.height - f_.bottom, f_.width - f_.right, f_.height - f_.bottom, "black");
    line(f_.left, f_.top, f_.left, f_.height - f_.bottom, "black");
    for (int i = 0; i <= 4; ++i) {
      const double v = f_.y0 + (f_.y1 - f_.y0) * i / 4.0;
      const double y = f_.py(v);
      line(f_.left - 4, y, f_.left, y, "black");
      text(f_.left - 6, y + 4, fmt(v), 10, "end");
    }
    text((f_.left + f_.width - f_.right) / 2, f_.height - 15, xlabel, 12, "middle");
    out_ << "<text x=\"15\" y=\"" << fmt((f_.top + f_.height - f_.bottom) / 2)
         << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
         << fmt((f_.top + f_.height - f_.bottom) / 2) << ")\">" << escape(ylabel) << "</text>\n";
  }

  const Frame& frame() const { return f_; }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  Frame f_;
  std::ostringstream out_;
};

inline std::string placeholder(const std::string& title, const std::string& notice) {
  Frame f;
  Canvas c(f, title);
  c.text(f.width / 2, f.height / 2, notice, 14, "middle");
  return c.finish();
}

inline double nice_top(double v) {
  if (!(v > 0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * mag >= v) return m * mag;
  }
  return 10 * mag;
}

// Bars with optional CI whiskers.
inline std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                             const std::vector<double>& values, const std::vector<std::optional<double>>& ci,
                             const std::string& xlabel, const std::string& ylabel) {
  if (values.empty()) return placeholder(title, "no data");
  Frame f;
  double top = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    top = std::max(top, values[i] + (i < ci.size() && ci[i] ? *ci[i] : 0.0));
  }
  f.y1 = nice_top(top);
  Canvas c(f, title);
  c.axes(xlabel, ylabel);
  const double slot = (f.width - f.left - f.right) / static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = f.left + slot * static_cast<double>(i) + slot * 0.15;
    const double w = slot * 0.7;
    c.rect(x, f.py(values[i]), w, f.py(0) - f.py(values[i]), color(0));
    if (i < ci.size() && ci[i]) {
      const double cx = x + w / 2;
      c.line(cx, f.py(values[i] - *ci[i]), cx, f.py(values[i] + *ci[i]), "black", 1.5);
      c.line(cx - 5, f.py(values[i] + *ci[i]), cx + 5, f.py(values[i] + *ci[i]), "black", 1.5);
      c.line(cx - 5, f.py(values[i] - *ci[i]), cx + 5, f.py(values[i] - *ci[i]), "black", 1.5);
    }
    c.text(x + w / 2, f.height - f.bottom + 16, i < labels.size() ? labels[i] : "", 11, "middle");
  }
  return c.finish();
}

struct Series {
  std::string name;
  std::vector<double> values;
  std::vector<std::optional<double>> ci;
};

// One polyline per series over shared categorical x positions.
inline std::string line_chart(const std::string& title, const std::vector<std::string>& xlabels,
                              const std::vector<Series>& series, const std::string& xlabel,
                              const std::string& ylabel) {
  bool any = false;
  double lo = 0, hi = 0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double e = i < s.ci.size() && s.ci[i] ? *s.ci[i] : 0.0;
      hi = any ? std::max(hi, s.values[i] + e) : s.values[i] + e;
      lo = any ? std::min(lo, s.values[i] - e) : s.values[i] - e;
      any = true;
    }
  }
  if (!any) return placeholder(title, "no data");
  Frame f;
  f.y0 = std::min(0.0, lo);
  f.y1 = nice_top(hi);
  const double n = static_cast<double>(std::max<std::size_t>(xlabels.size(), 2) - 1);
  f.x0 = -0.25;
  f.x1 = n + 0.25;
  Canvas c(f, title);
  c.axes(xlabel, ylabel);
  for (std::size_t i = 0; i < xlabels.size(); ++i) {
    c.text(f.px(static_cast<double>(i)), f.height - f.bottom + 16, xlabels[i], 11, "middle");
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < series[s].values.size(); ++i) {
      const double x = f.px(static_cast<double>(i)), y = f.py(series[s].values[i]);
      pts.emplace_back(x, y);
      c.circle(x, y, 3, color(s));
      if (i < series[s].ci.size() && series[s].ci[i]) {
        const double e = *series[s].ci[i];
        c.line(x, f.py(series[s].values[i] - e), x, f.py(series[s].values[i] + e), color(s), 1);
      }
    }
    c.polyline(pts, color(s));
    c.text(f.width - f.right - 110, f.top + 14 * static_cast<double>(s + 1), series[s].name, 11);
    c.rect(f.width - f.right - 122, f.top + 14 * static_cast<double>(s + 1) - 9, 9, 9, color(s));
  }
  return c.finish();
}

struct ScatterPoint {
  double x = 0, y = 0;
  int group = 0;
  std::string label;
};

// Scatter coloured by group; optionally with the y = x identity line.
inline std::string scatter(const std::string& title, const std::vector<ScatterPoint>& pts, const std::string& xlabel,
                           const std::string& ylabel, bool identity_line) {
  if (pts.empty()) return placeholder(title, "no data");
  double xl = pts[0].x, xh = pts[0].x, yl = pts[0].y, yh = pts[0].y;
  for (const auto& p : pts) {
    xl = std::min(xl, p.x);
    xh = std::max(xh, p.x);
    yl = std::min(yl, p.y);
    yh = std::max(yh, p.y);
  }
  if (identity_line) {
    xl = yl = std::min(xl, yl);
    xh = yh = std::max(xh, yh);
  }
  const double px = std::max(1e-9, (xh - xl) * 0.1), py = std::max(1e-9, (yh - yl) * 0.1);
  Frame f;
  f.x0 = xl - px;
  f.x1 = xh + px;
  f.y0 = yl - py;
  f.y1 = yh + py;
  Canvas c(f, title);
  c.axes(xlabel, ylabel);
  for (int i = 0; i <= 4; ++i) {
    const double v = f.x0 + (f.x1 - f.x0) * i / 4.0;
    c.text(f.px(v), f.height - f.bottom + 16, fmt(v), 10, "middle");
  }
  if (identity_line) {
    const double a = std::max(f.x0, f.y0), b = std::min(f.x1, f.y1);
    c.line(f.px(a), f.py(a), f.px(b), f.py(b), "#555555", 1, "4 3");
  }
  for (const auto& p : pts) {
    c.circle(f.px(p.x), f.py(p.y), 4, color(static_cast<std::size_t>(p.group)));
    if (!p.label.empty()) c.text(f.px(p.x) + 6, f.py(p.y) - 4, p.label, 9);
  }
  return c.finish();
}

}  // namespace egonet::svg
