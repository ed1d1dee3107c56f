#include "nvcpt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nvcpt/io.hpp"

namespace nvcpt {

namespace {

const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2f", v);
  return b;
}

struct Range {
  double lo = INFINITY, hi = -INFINITY;
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi == lo) lo -= 0.5, hi += 0.5;
  }
};

}  // namespace

std::string render_svg(const SvgPlot& p) {
  const double ml = 70, mr = 150, mt = 40, mb = 50;
  const double w = p.width - ml - mr, h = p.height - mt - mb;
  Range rx, ry;
  for (const auto& s : p.series) {
    for (double v : s.x) rx.add(v);
    for (double v : s.y) ry.add(v);
  }
  rx.finish();
  ry.finish();
  auto X = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * w; };
  auto Y = [&](double v) { return mt + h - (v - ry.lo) / (ry.hi - ry.lo) * h; };

  std::string o = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(p.width) + "\" height=\"" +
                  std::to_string(p.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + fmt(ml) + "\" y=\"24\" font-size=\"14\">" + esc(p.title) + "</text>\n";
  o += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = rx.lo + (rx.hi - rx.lo) * k / 4.0;
    const double vy = ry.lo + (ry.hi - ry.lo) * k / 4.0;
    o += "<text x=\"" + fmt(X(vx)) + "\" y=\"" + fmt(mt + h + 16) + "\" text-anchor=\"middle\">" + format_number(vx) +
         "</text>\n";
    o += "<text x=\"" + fmt(ml - 4) + "\" y=\"" + fmt(Y(vy) + 4) + "\" text-anchor=\"end\">" + format_number(vy) +
         "</text>\n";
  }
  o += "<text x=\"" + fmt(ml + w / 2) + "\" y=\"" + fmt(p.height - 10.0) + "\" text-anchor=\"middle\">" +
       esc(p.xlabel) + "</text>\n";
  o += "<text transform=\"translate(16," + fmt(mt + h / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       esc(p.ylabel) + "</text>\n";
  for (size_t i = 0; i < p.series.size(); ++i) {
    const auto& s = p.series[i];
    const std::string col = kColours[i % 10];
    std::string pts;
    for (size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      pts += fmt(X(s.x[k])) + "," + fmt(Y(s.y[k])) + " ";
    }
    o += "<polyline fill=\"none\" stroke=\"" + col + "\" stroke-width=\"1.5\"" +
         (s.dashed ? std::string(" stroke-dasharray=\"5,3\"") : std::string()) + " points=\"" + pts + "\"/>\n";
    const double ly = mt + 14.0 * static_cast<double>(i) + 8;
    o += "<line x1=\"" + fmt(ml + w + 10) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(ml + w + 30) + "\" y2=\"" +
         fmt(ly) + "\" stroke=\"" + col + "\"/>\n";
    o += "<text x=\"" + fmt(ml + w + 34) + "\" y=\"" + fmt(ly + 4) + "\">" + esc(s.name) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

std::string render_svg_heatmap(const std::string& title, const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<double>& v, const std::string& xlabel, const std::string& ylabel) {
  const int width = 640, height = 560;
  const double ml = 80, mt = 40, w = 480, h = 440;
  Range r;
  for (double a : v) r.add(a);
  r.finish();
  std::string o = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
                  std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + fmt(ml) + "\" y=\"24\" font-size=\"14\">" + esc(title) + "</text>\n";
  const double cw = w / std::max<size_t>(1, x.size()), ch = h / std::max<size_t>(1, y.size());
  for (size_t j = 0; j < y.size(); ++j)
    for (size_t i = 0; i < x.size(); ++i) {
      const double a = (v[j * x.size() + i] - r.lo) / (r.hi - r.lo);
      const int c = static_cast<int>(std::lround(255 * std::clamp(a, 0.0, 1.0)));
      char col[16];
      std::snprintf(col, sizeof col, "#%02x%02x%02x", c, c / 2, 255 - c);
      o += "<rect x=\"" + fmt(ml + cw * static_cast<double>(i)) + "\" y=\"" +
           fmt(mt + h - ch * static_cast<double>(j + 1)) + "\" width=\"" + fmt(cw + 0.5) + "\" height=\"" +
           fmt(ch + 0.5) + "\" fill=\"" + col + "\"/>\n";
    }
  if (!x.empty() && !y.empty()) {
    o += "<text x=\"" + fmt(ml) + "\" y=\"" + fmt(mt + h + 16) + "\">" + format_number(x.front()) + "</text>\n";
    o += "<text x=\"" + fmt(ml + w) + "\" y=\"" + fmt(mt + h + 16) + "\" text-anchor=\"end\">" +
         format_number(x.back()) + "</text>\n";
    o += "<text x=\"" + fmt(ml - 4) + "\" y=\"" + fmt(mt + h) + "\" text-anchor=\"end\">" + format_number(y.front()) +
         "</text>\n";
    o += "<text x=\"" + fmt(ml - 4) + "\" y=\"" + fmt(mt + 10) + "\" text-anchor=\"end\">" + format_number(y.back()) +
         "</text>\n";
  }
  o += "<text x=\"" + fmt(ml + w / 2) + "\" y=\"" + fmt(height - 10.0) + "\" text-anchor=\"middle\">" + esc(xlabel) +
       "</text>\n";
  o += "<text transform=\"translate(16," + fmt(mt + h / 2) + ") rotate(-90)\" text-anchor=\"middle\">" + esc(ylabel) +
       "</text>\n";
  o += "</svg>\n";
  return o;
}

}  // namespace nvcpt
