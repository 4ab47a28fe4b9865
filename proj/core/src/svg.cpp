#include "topovox/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "topovox/csv.hpp"

namespace topovox {
namespace {

constexpr double kSize = 420.0;
constexpr double kMargin = 50.0;
constexpr double kPlot = kSize - 2 * kMargin;

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  double map(double v) const { return (v - lo) / (hi - lo) * kPlot; }
};

Axis make_axis(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

void header(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" viewBox=\"0 0 " << kSize << " " << kSize << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kSize / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << xml_escape(title) << "</text>\n";
}

void frame(std::ostringstream& out, const Axis& ax, const Axis& ay, const std::string& x_label,
           const std::string& y_label) {
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kPlot << "\" height=\"" << kPlot
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = ax.lo + (ax.hi - ax.lo) * k / 4.0;
    const double fy = ay.lo + (ay.hi - ay.lo) * k / 4.0;
    const double px = kMargin + ax.map(fx);
    const double py = kSize - kMargin - ay.map(fy);
    out << "<text x=\"" << fmt(px) << "\" y=\"" << kSize - kMargin + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(fx) << "</text>\n";
    out << "<text x=\"" << kMargin - 6 << "\" y=\"" << fmt(py + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(fy) << "</text>\n";
  }
  out << "<text x=\"" << kSize / 2 << "\" y=\"" << kSize - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(x_label)
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << kSize / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\" transform=\"rotate(-90 14 " << kSize / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
}

const char* dim_colour(int dim) {
  switch (dim) {
    case 0:
      return "black";
    case 1:
      return "red";
    case 2:
      return "blue";
    default:
      return "gray";
  }
}

}  // namespace

std::string diagram_svg(const PersistenceDiagram& diagram, const std::string& title) {
  double lo = diagram.min_value, hi = diagram.max_value;
  for (const auto& q : diagram.points) {
    lo = std::min(lo, q.birth);
    if (!q.essential()) hi = std::max(hi, q.death);
  }
  const Axis axis = make_axis(lo, hi);
  std::ostringstream out;
  header(out, title);
  frame(out, axis, axis, "birth", "death");
  out << "<line class=\"diagonal\" x1=\"" << kMargin << "\" y1=\"" << kSize - kMargin << "\" x2=\""
      << kSize - kMargin << "\" y2=\"" << kMargin << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  for (const auto& q : diagram.points) {
    const double death = q.essential() ? hi : q.death;
    const double cx = kMargin + axis.map(q.birth);
    const double cy = kSize - kMargin - axis.map(death);
    out << "<circle class=\"point h" << q.dim << (q.essential() ? " essential" : "") << "\" cx=\"" << fmt(cx)
        << "\" cy=\"" << fmt(cy) << "\" r=\"3\" fill=\"" << dim_colour(q.dim) << "\" fill-opacity=\"0.7\""
        << " data-dim=\"" << q.dim << "\" data-birth=\"" << csv::format_double(q.birth) << "\" data-death=\""
        << csv::format_double(q.death) << "\"/>\n";
  }
  double legend_y = kMargin + 12;
  for (int d = 0; d <= 2; ++d) {
    const bool present = std::any_of(diagram.points.begin(), diagram.points.end(),
                                     [d](const PersistencePair& q) { return q.dim == d; });
    if (!present) continue;
    out << "<circle cx=\"" << kSize - kMargin - 40 << "\" cy=\"" << legend_y << "\" r=\"4\" fill=\"" << dim_colour(d)
        << "\"/><text x=\"" << kSize - kMargin - 32 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">H" << d << "</text>\n";
    legend_y += 16;
  }
  out << "</svg>\n";
  return out.str();
}

std::string scatter_svg(const std::vector<ScatterPoint>& points, const std::string& title, const std::string& x_label,
                        const std::string& y_label) {
  static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
                                   "#7f7f7f", "#bcbd22", "#17becf"};
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  std::map<std::string, std::size_t> groups;
  for (const auto& p : points) {
    x_lo = std::min(x_lo, p.x);
    x_hi = std::max(x_hi, p.x);
    y_lo = std::min(y_lo, p.y);
    y_hi = std::max(y_hi, p.y);
    groups.emplace(p.group, 0);
  }
  if (points.empty()) x_lo = x_hi = y_lo = y_hi = 0.0;
  std::size_t k = 0;
  for (auto& [name, index] : groups) index = k++;
  const Axis ax = make_axis(x_lo, x_hi), ay = make_axis(y_lo, y_hi);
  std::ostringstream out;
  header(out, title);
  frame(out, ax, ay, x_label, y_label);
  for (const auto& p : points) {
    const auto colour = kPalette[groups[p.group] % std::size(kPalette)];
    out << "<circle cx=\"" << fmt(kMargin + ax.map(p.x)) << "\" cy=\"" << fmt(kSize - kMargin - ay.map(p.y))
        << "\" r=\"2.5\" fill=\"" << colour << "\" fill-opacity=\"0.6\" data-group=\"" << xml_escape(p.group)
        << "\"/>\n";
  }
  double legend_y = kMargin + 12;
  for (const auto& [name, index] : groups) {
    if (index >= 20) break;
    out << "<circle cx=\"" << kSize - kMargin + 8 << "\" cy=\"" << legend_y << "\" r=\"3\" fill=\""
        << kPalette[index % std::size(kPalette)] << "\"/><text x=\"" << kSize - kMargin + 14 << "\" y=\""
        << legend_y + 3 << "\" font-family=\"sans-serif\" font-size=\"8\">" << xml_escape(name) << "</text>\n";
    legend_y += 11;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace topovox
