#include "tsbench/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsbench/errors.hpp"

namespace tsbench {

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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

std::string tick_label(double v, bool log_axis) {
  if (log_axis) return "1e" + std::to_string(static_cast<long>(std::lround(v)));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Nice linear tick step covering `span` with roughly five ticks.
double tick_step(double span, bool log_axis) {
  if (log_axis) return std::max(1.0, std::ceil(span / 8.0));
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

}  // namespace

void validate_plot(const PlotSpec& spec) {
  if (spec.points.empty()) throw ValidationError("plot '" + spec.title + "': empty series");
  auto check = [&](double v, bool log_axis, const char* what) {
    if (!std::isfinite(v)) throw ValidationError(std::string("plot: non-finite ") + what);
    if (log_axis && !(v > 0.0)) throw ValidationError(std::string("plot: nonpositive ") + what + " on log axis");
  };
  for (const auto& p : spec.points) {
    check(p.x, spec.log_x, "x");
    check(p.y, spec.log_y, "y");
    if (p.y_low) check(*p.y_low, spec.log_y, "error bar");
    if (p.y_high) check(*p.y_high, spec.log_y, "error bar");
  }
  for (const auto& r : spec.references)
    if (!std::isfinite(r.slope) || !std::isfinite(r.intercept))
      throw ValidationError("plot: non-finite reference line");
}

std::string render_svg(const PlotSpec& spec) {
  validate_plot(spec);
  auto tx = [&](double x) { return spec.log_x ? std::log10(x) : x; };
  auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };

  double x0 = tx(spec.points.front().x), x1 = x0;
  double y0 = ty(spec.points.front().y), y1 = y0;
  for (const auto& p : spec.points) {
    x0 = std::min(x0, tx(p.x));
    x1 = std::max(x1, tx(p.x));
    for (double y : {p.y, p.y_low.value_or(p.y), p.y_high.value_or(p.y)}) {
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  }
  auto pad = [](double& lo, double& hi) {
    const double span = hi - lo;
    const double margin = span > 0.0 ? 0.08 * span : 0.5;
    lo -= margin;
    hi += margin;
  };
  pad(x0, x1);
  pad(y0, y1);

  constexpr double kBox = 480.0;
  constexpr double kLeft = 80.0, kTop = 50.0, kBottom = 60.0, kRight = 30.0;
  double sx = kBox / (x1 - x0);
  double sy = kBox / (y1 - y0);
  if (spec.equal_aspect) sx = sy = std::min(sx, sy);
  const double width = (x1 - x0) * sx;
  const double height = (y1 - y0) * sy;
  auto px = [&](double u) { return kLeft + (u - x0) * sx; };
  auto py = [&](double v) { return kTop + (y1 - v) * sy; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt2(kLeft + width + kRight)
     << "\" height=\"" << fmt2(kTop + height + kBottom) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fmt2(kLeft + width / 2) << "\" y=\"25\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(spec.title) << "</text>\n";

  // Frame and ticks.
  os << "<path d=\"M" << fmt2(px(x0)) << ' ' << fmt2(py(y0)) << " H" << fmt2(px(x1)) << " V"
     << fmt2(py(y1)) << " H" << fmt2(px(x0)) << " Z\" fill=\"none\" stroke=\"black\"/>\n";
  std::ostringstream ticks;
  const double xs = tick_step(x1 - x0, spec.log_x);
  for (double u = std::ceil(x0 / xs) * xs; u <= x1; u += xs) {
    ticks << "M" << fmt2(px(u)) << ' ' << fmt2(py(y0)) << " v-5 ";
    os << "<text x=\"" << fmt2(px(u)) << "\" y=\"" << fmt2(py(y0) + 18) << "\" text-anchor=\"middle\">"
       << tick_label(u, spec.log_x) << "</text>\n";
  }
  const double ys = tick_step(y1 - y0, spec.log_y);
  for (double v = std::ceil(y0 / ys) * ys; v <= y1; v += ys) {
    ticks << "M" << fmt2(px(x0)) << ' ' << fmt2(py(v)) << " h5 ";
    os << "<text x=\"" << fmt2(px(x0) - 6) << "\" y=\"" << fmt2(py(v) + 4) << "\" text-anchor=\"end\">"
       << tick_label(v, spec.log_y) << "</text>\n";
  }
  os << "<path d=\"" << ticks.str() << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << fmt2(kLeft + width / 2) << "\" y=\"" << fmt2(kTop + height + 45)
     << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  os << "<text transform=\"translate(20," << fmt2(kTop + height / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";

  // Reference lines, clipped to the frame.
  for (const auto& r : spec.references) {
    double ua = x0, ub = x1;
    auto v_at = [&](double u) { return r.slope * u + r.intercept; };
    if (r.slope != 0.0) {
      double lo = (y0 - r.intercept) / r.slope;
      double hi = (y1 - r.intercept) / r.slope;
      if (lo > hi) std::swap(lo, hi);
      ua = std::max(ua, lo);
      ub = std::min(ub, hi);
    }
    if (ua >= ub || (r.slope == 0.0 && (r.intercept < y0 || r.intercept > y1))) continue;
    os << "<line x1=\"" << fmt2(px(ua)) << "\" y1=\"" << fmt2(py(v_at(ua))) << "\" x2=\""
       << fmt2(px(ub)) << "\" y2=\"" << fmt2(py(v_at(ub)))
       << "\" stroke=\"firebrick\" stroke-dasharray=\"6 4\"><title>" << escape(r.label)
       << "</title></line>\n";
  }

  std::ostringstream bars;
  for (const auto& p : spec.points) {
    if (p.y_low || p.y_high) {
      bars << "M" << fmt2(px(tx(p.x))) << ' ' << fmt2(py(ty(p.y_low.value_or(p.y)))) << " V"
           << fmt2(py(ty(p.y_high.value_or(p.y)))) << ' ';
    }
  }
  if (!bars.str().empty()) os << "<path d=\"" << bars.str() << "\" stroke=\"steelblue\"/>\n";
  for (const auto& p : spec.points) {
    os << "<circle cx=\"" << fmt2(px(tx(p.x))) << "\" cy=\"" << fmt2(py(ty(p.y)))
       << "\" r=\"3\" fill=\"steelblue\"><title>" << escape(p.label) << "</title></circle>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg(const PlotSpec& spec, const std::filesystem::path& path) {
  const std::string svg = render_svg(spec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << svg;
}

}  // namespace tsbench
