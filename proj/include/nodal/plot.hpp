#pragma once

#include <fstream>
#include <iomanip>

#include "nodal/fit.hpp"

namespace nodal {

// Minimal SVG log-log line chart; one polyline per series plus a legend.
struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // positive (x, y)
};

inline void write_loglog_svg(std::ostream& out, const std::string& title,
                             const std::vector<PlotSeries>& series) {
  const int width = 720, height = 480;
  const int ml = 70, mr = 20, mt = 40, mb = 50;
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      if (!(p.first > 0) || !(p.second > 0))
        throw domain_error("log-log plot requires positive data");
      xlo = std::min(xlo, std::log10(p.first));
      xhi = std::max(xhi, std::log10(p.first));
      ylo = std::min(ylo, std::log10(p.second));
      yhi = std::max(yhi, std::log10(p.second));
    }
  if (series.empty() || xlo > xhi) throw domain_error("nothing to plot");
  if (xhi - xlo < 1e-12) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  if (yhi - ylo < 1e-12) {
    ylo -= 0.5;
    yhi += 0.5;
  }
  auto X = [&](double lx) {
    return ml + (lx - xlo) / (xhi - xlo) * (width - ml - mr);
  };
  auto Y = [&](double ly) {
    return height - mb - (ly - ylo) / (yhi - ylo) * (height - mt - mb);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                 "#9467bd", "#ff7f0e", "#8c564b"};
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << width / 2 << "' y='24' text-anchor='middle' "
      << "font-family='sans-serif' font-size='16'>" << title << "</text>\n";
  // frame
  out << "<rect x='" << ml << "' y='" << mt << "' width='"
      << (width - ml - mr) << "' height='" << (height - mt - mb)
      << "' fill='none' stroke='black'/>\n";
  // decade ticks
  for (int d = static_cast<int>(std::ceil(xlo)); d <= std::floor(xhi); ++d) {
    double x = X(d);
    out << "<line x1='" << x << "' y1='" << height - mb << "' x2='" << x
        << "' y2='" << height - mb + 5 << "' stroke='black'/>\n";
    out << "<text x='" << x << "' y='" << height - mb + 20
        << "' text-anchor='middle' font-family='sans-serif' "
        << "font-size='12'>1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ylo)); d <= std::floor(yhi); ++d) {
    double y = Y(d);
    out << "<line x1='" << ml - 5 << "' y1='" << y << "' x2='" << ml
        << "' y2='" << y << "' stroke='black'/>\n";
    out << "<text x='" << ml - 8 << "' y='" << y + 4
        << "' text-anchor='end' font-family='sans-serif' font-size='12'>1e"
        << d << "</text>\n";
  }
  int ci = 0;
  for (const auto& s : series) {
    const char* color = colors[ci % 6];
    out << "<polyline fill='none' stroke='" << color
        << "' stroke-width='1.5' points='";
    for (const auto& p : s.points)
      out << X(std::log10(p.first)) << ',' << Y(std::log10(p.second)) << ' ';
    out << "'/>\n";
    for (const auto& p : s.points)
      out << "<circle cx='" << X(std::log10(p.first)) << "' cy='"
          << Y(std::log10(p.second)) << "' r='2.5' fill='" << color
          << "'/>\n";
    out << "<text x='" << width - mr - 8 << "' y='" << mt + 16 + 16 * ci
        << "' text-anchor='end' font-family='sans-serif' font-size='12' "
        << "fill='" << color << "'>" << s.name << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
}

}  // namespace nodal
