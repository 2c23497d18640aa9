#include "ctxsal/heatmap_svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ctxsal {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

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

// 1, 2, 5, 10, 20, 50, ... until at most `target` ticks remain.
std::size_t tick_step(std::size_t n, std::size_t target) {
  for (std::size_t decade = 1;; decade *= 10) {
    for (std::size_t m : {1, 2, 5}) {
      if (n / (m * decade) <= target) return m * decade;
    }
  }
}

}  // namespace

std::string render_heatmap_svg(const SaliencyMask& mask, const HeatmapOptions& opts) {
  const std::size_t C = mask.channels();
  const std::size_t T = mask.timesteps();
  const double left = 56.0;
  const double top = opts.title.empty() ? 16.0 : 36.0;
  const double plot_w = opts.cell_width * static_cast<double>(T);
  const double plot_h = opts.cell_height * static_cast<double>(C);
  const double width = left + plot_w + 16.0;
  const double height = top + plot_h + 48.0;

  std::string s;
  s.reserve(C * T * 72 + 4096);
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
       num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" fill=\"white\"/>\n";
  if (!opts.title.empty()) {
    s += "<text x=\"" + num(left + plot_w / 2) +
         "\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" +
         escape(opts.title) + "</text>\n";
  }
  s += "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t ch = 0; ch < C; ++ch) {
    for (std::size_t t = 0; t < T; ++t) {
      const double v = std::clamp(mask(ch, t), 0.0, 1.0);
      const int level = static_cast<int>(std::lround(255.0 * (1.0 - v)));
      s += "<rect x=\"" + num(left + opts.cell_width * static_cast<double>(t)) + "\" y=\"" +
           num(top + opts.cell_height * static_cast<double>(ch)) + "\" width=\"" +
           num(opts.cell_width) + "\" height=\"" + num(opts.cell_height) + "\" fill=\"rgb(" +
           std::to_string(level) + "," + std::to_string(level) + "," + std::to_string(level) +
           ")\"/>\n";
    }
  }
  s += "</g>\n";
  s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) +
       "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  s += "<g font-family=\"sans-serif\" font-size=\"10\">\n";
  const std::size_t cstep = tick_step(C, 16);
  for (std::size_t ch = 0; ch < C; ch += cstep) {
    const double y = top + opts.cell_height * (static_cast<double>(ch) + 0.5);
    s += "<text x=\"" + num(left - 4) + "\" y=\"" + num(y + 3) + "\" text-anchor=\"end\">" +
         std::to_string(ch) + "</text>\n";
  }
  const std::size_t tstep = tick_step(T, 10);
  for (std::size_t t = 0; t < T; t += tstep) {
    const double x = left + opts.cell_width * static_cast<double>(t);
    s += "<line x1=\"" + num(x) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(x) +
         "\" y2=\"" + num(top + plot_h + 4) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(x) + "\" y=\"" + num(top + plot_h + 15) +
         "\" text-anchor=\"middle\">" + std::to_string(t) + "</text>\n";
  }
  s += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(top + plot_h + 36) +
       "\" font-size=\"12\" text-anchor=\"middle\">time step</text>\n";
  s += "<text x=\"14\" y=\"" + num(top + plot_h / 2) +
       "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
       num(top + plot_h / 2) + ")\">channel</text>\n";
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace ctxsal
