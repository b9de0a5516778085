#include "gcnal/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gcnal/error.hpp"

namespace gcnal {
namespace {

std::string sig9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed while writing " + path.string());
}

void append_rows(std::ostringstream& os, const Curve& curve, const std::string& prefix) {
  for (const auto& p : curve.points) {
    os << prefix << p.cycle << ',' << p.labelled << ',' << sig9(p.mean) << ',' << sig9(p.stddev);
    for (double m : p.trials) os << ',' << sig9(m);
    os << '\n';
  }
}

std::string header(std::size_t trials) {
  std::string h = "cycle,labelled,metric_mean,metric_std";
  for (std::size_t t = 0; t < trials; ++t) h += ",trial_" + std::to_string(t);
  return h;
}

// Evenly spaced ticks over [lo, hi].
std::array<double, 5> ticks(double lo, double hi) {
  std::array<double, 5> t{};
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = lo + (hi - lo) * static_cast<double>(i) / 4.0;
  return t;
}

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string format_curve_csv(const Curve& curve) {
  std::ostringstream os;
  os << header(curve.trials()) << '\n';
  append_rows(os, curve, "");
  return os.str();
}

void write_curve_csv(const Curve& curve, const std::filesystem::path& path) {
  write_text(format_curve_csv(curve), path);
}

std::string format_compare_csv(std::span<const Curve> curves) {
  if (curves.empty()) throw Error("no curves to write");
  std::ostringstream os;
  os << "strategy," << header(curves.front().trials()) << '\n';
  for (const auto& c : curves) {
    if (c.trials() != curves.front().trials()) throw Error("curves differ in trial count");
    append_rows(os, c, c.label + ",");
  }
  return os.str();
}

void write_compare_csv(std::span<const Curve> curves, const std::filesystem::path& path) {
  write_text(format_compare_csv(curves), path);
}

std::string render_plot_svg(std::span<const Curve> curves, const std::string& y_label) {
  if (curves.empty()) throw Error("emit_plot needs at least one curve");
  constexpr double width = 800, height = 500;
  constexpr double left = 80, right = 190, top = 30, bottom = 60;
  const double pw = width - left - right;
  const double ph = height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      xmin = std::min(xmin, static_cast<double>(p.labelled));
      xmax = std::max(xmax, static_cast<double>(p.labelled));
      ymin = std::min(ymin, p.mean - p.stddev);
      ymax = std::max(ymax, p.mean + p.stddev);
    }
  }
  if (!std::isfinite(xmin)) throw Error("emit_plot: curves have no points");
  if (xmax == xmin) { xmin -= 1; xmax += 1; }
  if (ymax == ymin) { ymin -= 0.5; ymax += 0.5; }
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n";

  os << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(xmin, xmax)) {
    os << "<line x1=\"" << coord(sx(t)) << "\" y1=\"" << top + ph << "\" x2=\"" << coord(sx(t))
       << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << coord(sx(t)) << "\" y=\"" << top + ph + 20
       << "\" text-anchor=\"middle\">" << sig9(std::round(t)) << "</text>\n";
  }
  for (double t : ticks(ymin, ymax)) {
    char label[32];
    std::snprintf(label, sizeof label, "%.4g", t);
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << coord(sy(t)) << "\" x2=\"" << left
       << "\" y2=\"" << coord(sy(t)) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << left - 8 << "\" y=\"" << coord(sy(t) + 4)
       << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
     << "\" text-anchor=\"middle\">labelled examples</text>\n"
     << "<text x=\"20\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << top + ph / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
  os << "</g>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const char* colour = kPalette[i % kPalette.size()];
    std::string band, line;
    for (const auto& p : c.points)
      band += coord(sx(p.labelled)) + "," + coord(sy(p.mean + p.stddev)) + " ";
    for (auto it = c.points.rbegin(); it != c.points.rend(); ++it)
      band += coord(sx(it->labelled)) + "," + coord(sy(it->mean - it->stddev)) + " ";
    for (const auto& p : c.points) line += coord(sx(p.labelled)) + "," + coord(sy(p.mean)) + " ";
    os << "<g class=\"series\" data-label=\"" << xml_escape(c.label) << "\">\n"
       << "<polygon class=\"band\" points=\"" << band << "\" fill=\"" << colour
       << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n"
       << "<polyline class=\"mean\" points=\"" << line << "\" fill=\"none\" stroke=\"" << colour
       << "\" stroke-width=\"2\"/>\n"
       << "</g>\n";

    const double ly = top + 10 + 22 * static_cast<double>(i);
    os << "<line x1=\"" << width - right + 15 << "\" y1=\"" << ly << "\" x2=\""
       << width - right + 40 << "\" y2=\"" << ly << "\" stroke=\"" << colour
       << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << width - right + 46 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(c.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_plot(std::span<const Curve> curves, const std::filesystem::path& path,
               const std::string& y_label) {
  write_text(render_plot_svg(curves, y_label), path);
}

}  // namespace gcnal
