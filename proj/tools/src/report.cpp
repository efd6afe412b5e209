#include "pmedian_cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include "pmedian_cli/dataset.hpp"

namespace pmedian::cli {

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << kSweepHeader << '\n';
  for (const auto& r : result.rows) {
    out << format_double(r.alpha) << ',' << r.trial << ',' << to_string(r.estimator) << ','
        << format_double(r.error) << ',' << r.termination << '\n';
  }
}

void write_breakdown_csv(std::ostream& out, const BreakdownTable& table) {
  out << kBreakdownHeader << '\n';
  for (const auto& r : table.rows) out << format_double(r.radius) << ',' << format_double(r.distance) << '\n';
}

void write_perturbation_csv(std::ostream& out, const PerturbationTable& table) {
  out << kPerturbationHeader << '\n';
  for (const auto& r : table.rows) out << format_double(r.epsilon) << ',' << format_double(r.displacement) << '\n';
}

void write_trace_csv(std::ostream& out, const SolverReport& report) {
  out << kTraceHeader << '\n';
  for (size_t k = 0; k < report.objective_trace.size(); ++k) {
    out << k << ',' << format_double(report.objective_trace[k]) << ',' << format_double(report.residual_trace[k])
        << '\n';
  }
}

namespace {

std::string fmt(double v, int precision = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series) {
  constexpr double kWidth = 640, kHeight = 420;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x0 = INFINITY, x1 = -INFINITY, y1 = 0.0;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) x0 = 0.0, x1 = 1.0;
  if (!(y1 > 0.0)) y1 = 1.0;
  y1 *= 1.05;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - y / y1 * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double xv = x0 + (x1 - x0) * t / 5.0;
    const double yv = y1 * t / 5.0;
    svg << "<line x1=\"" << px(xv) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << px(xv) << "\" y2=\""
        << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(xv) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">" << fmt(xv)
        << "</text>\n";
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << kLeft << "\" y2=\"" << py(yv)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << fmt(yv)
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kTop + plot_h / 2 << ")\">" << escape(y_label) << "</text>\n";

  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (i) svg << ' ';
      svg << fmt(px(s.x[i]), 6) << ',' << fmt(py(s.y[i]), 6);
    }
    svg << "\"/>\n";
    const double ly = kTop + 12 + 18.0 * static_cast<double>(k);
    svg << "<line x1=\"" << kLeft + 12 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + 36 << "\" y2=\"" << ly
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + 42 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string sweep_chart_svg(const SweepResult& result, const std::string& title) {
  std::map<double, int> alphas;
  for (const auto& r : result.rows) alphas.emplace(r.alpha, 0);
  std::vector<Series> series = {{to_string(Estimator::FrechetMean), "#d62728", {}, {}},
                                {to_string(Estimator::GeometricMedian), "#1f77b4", {}, {}}};
  for (const auto& [alpha, unused] : alphas) {
    series[0].x.push_back(alpha);
    series[0].y.push_back(result.mean_error(alpha, Estimator::FrechetMean));
    series[1].x.push_back(alpha);
    series[1].y.push_back(result.mean_error(alpha, Estimator::GeometricMedian));
  }
  return line_chart_svg(title, "contamination rate alpha", "estimation error", series);
}

}  // namespace pmedian::cli
