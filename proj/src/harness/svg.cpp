#include "cusploc/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cusploc/error.hpp"

namespace cusploc::harness {
namespace {

constexpr double kPanelW = 480, kPanelH = 340;
constexpr double kLeft = 64, kRight = 16, kTop = 32, kBottom = 48;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v) const {
    const double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo)) : (v - lo) / (hi - lo);
    return t;
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::floor(std::log10(lo)); e <= std::ceil(std::log10(hi)); e += 1) {
        const double v = std::pow(10.0, e);
        if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) out.push_back(v);
      }
      if (out.size() < 2) out = {lo, hi};
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 5;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (raw <= m * mag) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
      out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    return out;
  }
};

Axis make_axis(const std::vector<Series>& series, bool y, bool log, const std::optional<std::pair<double, double>>& r) {
  Axis a;
  a.log = log;
  if (r) {
    a.lo = r->first;
    a.hi = r->second;
  } else {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : series) {
      const auto& v = y ? s.y : s.x;
      for (std::size_t i = 0; i < v.size(); ++i) {
        double l = v[i], h = v[i];
        if (y && !s.error.empty()) {
          l -= s.error[i];
          h += s.error[i];
        }
        if (log && !(l > 0)) l = v[i];
        if (!std::isfinite(l) || !std::isfinite(h) || (log && !(l > 0))) continue;
        lo = std::min(lo, l);
        hi = std::max(hi, h);
      }
    }
    if (!std::isfinite(lo)) {
      lo = log ? 0.1 : 0.0;
      hi = 1.0;
    }
    if (hi == lo) {
      hi = log ? hi * 2 : hi + 1;
      lo = log ? lo / 2 : lo - 1;
    }
    if (log) {
      lo /= 1.1;
      hi *= 1.1;
    } else {
      const double pad = 0.04 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
    a.lo = lo;
    a.hi = hi;
  }
  if (!(a.hi > a.lo) || (log && !(a.lo > 0))) throw DomainError("invalid plot axis range");
  return a;
}

void render_panel(std::string& out, const Plot& p, double ox, double oy) {
  const Axis ax = make_axis(p.series, false, p.log_x, p.x_range);
  const Axis ay = make_axis(p.series, true, p.log_y, p.y_range);
  const double w = kPanelW - kLeft - kRight, h = kPanelH - kTop - kBottom;
  const double x0 = ox + kLeft, y0 = oy + kTop;
  auto px = [&](double v) { return x0 + ax.map(v) * w; };
  auto py = [&](double v) { return y0 + (1 - ay.map(v)) * h; };
  auto visible = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    if ((ax.log && !(x > 0)) || (ay.log && !(y > 0))) return false;
    return true;
  };

  out += "<g>\n";
  out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" fill=\"none\" stroke=\"#444\"/>\n";
  out += "<text x=\"" + num(ox + kPanelW / 2) + "\" y=\"" + num(oy + 20) +
         "\" text-anchor=\"middle\" font-size=\"14\">" + xml_escape(p.title) + "</text>\n";
  for (double t : ax.ticks()) {
    const double x = px(t);
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(y0 + h) + "\" x2=\"" + num(x) + "\" y2=\"" + num(y0 + h + 5) +
           "\" stroke=\"#444\"/>\n";
    out += "<text x=\"" + num(x) + "\" y=\"" + num(y0 + h + 18) + "\" text-anchor=\"middle\" font-size=\"11\">" +
           xml_escape(tick_label(t)) + "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = py(t);
    out += "<line x1=\"" + num(x0 - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(y) +
           "\" stroke=\"#444\"/>\n";
    out += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
           xml_escape(tick_label(t)) + "</text>\n";
  }
  out += "<text x=\"" + num(x0 + w / 2) + "\" y=\"" + num(oy + kPanelH - 8) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + xml_escape(p.x_label) + "</text>\n";
  out += "<text transform=\"translate(" + num(ox + 14) + "," + num(y0 + h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" + xml_escape(p.y_label) + "</text>\n";

  const std::string clip = "clip" + num(ox).substr(0, num(ox).find('.')) + "_" + num(oy).substr(0, num(oy).find('.'));
  out += "<clipPath id=\"" + clip + "\"><rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(w) +
         "\" height=\"" + num(h) + "\"/></clipPath>\n";
  out += "<g clip-path=\"url(#" + clip + ")\">\n";
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const Series& s = p.series[k];
    if (s.x.size() != s.y.size() || (!s.error.empty() && s.error.size() != s.y.size()))
      throw DomainError("plot series '" + s.label + "' has mismatched lengths");
    const std::string color = s.color.empty() ? kPalette[k % std::size(kPalette)] : s.color;
    const std::string dash = s.dashed ? " stroke-dasharray=\"6,4\"" : "";
    if (s.style == SeriesStyle::Points) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!visible(s.x[i], s.y[i])) continue;
        out += "<circle cx=\"" + num(px(s.x[i])) + "\" cy=\"" + num(py(s.y[i])) + "\" r=\"3\" fill=\"" + color +
               "\"/>\n";
      }
    } else {
      std::string d;
      bool pen = false;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!visible(s.x[i], s.y[i])) {
          pen = false;
          continue;
        }
        if (s.style == SeriesStyle::Steps && pen) d += " L" + num(px(s.x[i])) + "," + num(py(s.y[i - 1]));
        d += (pen ? " L" : " M") + num(px(s.x[i])) + "," + num(py(s.y[i]));
        pen = true;
      }
      if (!d.empty())
        out += "<path d=\"" + d.substr(1) + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"" + dash +
               "/>\n";
    }
    for (std::size_t i = 0; i < s.error.size(); ++i) {
      const double lo = s.y[i] - s.error[i], hi = s.y[i] + s.error[i];
      if (!visible(s.x[i], lo) || !visible(s.x[i], hi)) continue;
      out += "<line x1=\"" + num(px(s.x[i])) + "\" y1=\"" + num(py(lo)) + "\" x2=\"" + num(px(s.x[i])) + "\" y2=\"" +
             num(py(hi)) + "\" stroke=\"" + color + "\"/>\n";
    }
  }
  out += "</g>\n";
  double ly = y0 + 14;
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const Series& s = p.series[k];
    if (s.label.empty()) continue;
    const std::string color = s.color.empty() ? kPalette[k % std::size(kPalette)] : s.color;
    out += "<line x1=\"" + num(x0 + w - 150) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(x0 + w - 130) +
           "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(x0 + w - 125) + "\" y=\"" + num(ly) + "\" font-size=\"11\">" + xml_escape(s.label) +
           "</text>\n";
    ly += 15;
  }
  out += "</g>\n";
}

}  // namespace

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_svg(const std::vector<Plot>& panels, int columns) {
  if (panels.empty()) throw DomainError("nothing to plot");
  columns = std::max(1, std::min<int>(columns, static_cast<int>(panels.size())));
  const int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
  const double width = columns * kPanelW, height = rows * kPanelH;
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const int r = static_cast<int>(i) / columns, c = static_cast<int>(i) % columns;
    render_panel(out, panels[i], c * kPanelW, r * kPanelH);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace cusploc::harness
