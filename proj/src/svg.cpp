#include "chanspec/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chanspec {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMargin = 60;

struct Range {
  double lo = 0, hi = 1;
  double map(double v, double pix_lo, double pix_hi) const {
    double t = (v - lo) / (hi - lo);
    return pix_lo + t * (pix_hi - pix_lo);
  }
};

Range nice_range(double lo, double hi) {
  if (!(hi > lo)) {
    hi = lo + 1;
    lo -= 1;
  }
  double pad = 0.05 * (hi - lo);
  return Range{lo - pad, hi + pad};
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

void open_file(std::ofstream& out, const std::string& path) {
  out.open(path);
  if (!out) {
    throw std::runtime_error("cannot write svg file: " + path);
  }
}

}  // namespace

void svg_line_plot(const std::string& path, const std::vector<SvgSeries>& series,
                   const std::string& title, const std::string& xlabel,
                   const std::string& ylabel) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
  }
  if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
  Range rx = nice_range(xmin, xmax), ry = nice_range(ymin, ymax);
  auto px = [&](double x) { return rx.map(x, kMargin, kWidth - kMargin / 2); };
  auto py = [&](double y) { return ry.map(y, kHeight - kMargin, kMargin / 2); };

  std::ofstream out;
  open_file(out, path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin / 2 << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kMargin << "\" y2=\"" << kMargin / 2 << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    double xv = rx.lo + (rx.hi - rx.lo) * t / 5.0;
    double yv = ry.lo + (ry.hi - ry.lo) * t / 5.0;
    out << "<line x1=\"" << px(xv) << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << px(xv)
        << "\" y2=\"" << kHeight - kMargin + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(xv) << "\" y=\"" << kHeight - kMargin + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    out << "<line x1=\"" << kMargin - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << kMargin
        << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kMargin - 8 << "\" y=\"" << py(yv) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
  }
  out << "<text x=\"" << kWidth / 2 << "\" y=\"18\" font-size=\"14\" text-anchor=\"middle\">"
      << title << "</text>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" font-size=\"12\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  out << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kHeight / 2 << ")\">" << ylabel << "</text>\n";

  int legend_y = kMargin / 2 + 10;
  for (const auto& s : series) {
    if (s.markers) {
      for (size_t i = 0; i < s.x.size(); ++i) {
        out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
            << "\" r=\"2.2\" fill=\"" << s.color << "\"/>\n";
      }
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
      for (size_t i = 0; i < s.x.size(); ++i) {
        out << px(s.x[i]) << "," << py(s.y[i]) << " ";
      }
      out << "\"/>\n";
    }
    if (!s.label.empty()) {
      out << "<rect x=\"" << kWidth - 190 << "\" y=\"" << legend_y - 8
          << "\" width=\"12\" height=\"12\" fill=\"" << s.color << "\"/>\n";
      out << "<text x=\"" << kWidth - 172 << "\" y=\"" << legend_y + 2
          << "\" font-size=\"11\">" << s.label << "</text>\n";
      legend_y += 18;
    }
  }
  out << "</svg>\n";
}

void svg_unit_circle_plot(const std::string& path, const std::vector<SvgPoleSet>& sets,
                          const std::string& title) {
  const int size = 560;
  const double cx = size / 2.0, cy = size / 2.0;
  const double scale = size / 2.0 - 50;
  std::ofstream out;
  open_file(out, path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << " " << size << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << scale
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<line x1=\"" << cx - scale - 10 << "\" y1=\"" << cy << "\" x2=\"" << cx + scale + 10
      << "\" y2=\"" << cy << "\" stroke=\"#ccc\"/>\n";
  out << "<line x1=\"" << cx << "\" y1=\"" << cy - scale - 10 << "\" x2=\"" << cx << "\" y2=\""
      << cy + scale + 10 << "\" stroke=\"#ccc\"/>\n";
  out << "<text x=\"" << cx << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" << title
      << "</text>\n";
  int legend_y = 40;
  for (const auto& s : sets) {
    for (size_t i = 0; i < s.re.size(); ++i) {
      double x = cx + scale * s.re[i];
      double y = cy - scale * s.im[i];
      if (s.marker == "cross") {
        out << "<path d=\"M" << x - 4 << " " << y - 4 << " L" << x + 4 << " " << y + 4 << " M"
            << x - 4 << " " << y + 4 << " L" << x + 4 << " " << y - 4 << "\" stroke=\""
            << s.color << "\" stroke-width=\"1.5\"/>\n";
      } else if (s.marker == "diamond") {
        out << "<path d=\"M" << x << " " << y - 5 << " L" << x + 5 << " " << y << " L" << x
            << " " << y + 5 << " L" << x - 5 << " " << y << " Z\" fill=\"none\" stroke=\""
            << s.color << "\" stroke-width=\"1.5\"/>\n";
      } else {
        out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"none\" stroke=\""
            << s.color << "\" stroke-width=\"1.5\"/>\n";
      }
    }
    if (!s.label.empty()) {
      out << "<text x=\"12\" y=\"" << legend_y << "\" font-size=\"12\" fill=\"" << s.color
          << "\">" << s.label << "</text>\n";
      legend_y += 16;
    }
  }
  out << "</svg>\n";
}

}  // namespace chanspec
