#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pmedian/robustness.hpp"
#include "pmedian/solvers.hpp"

namespace pmedian::cli {

// CSV headers are part of the output contract.
inline constexpr const char* kSweepHeader = "alpha,trial,estimator,error,termination";
inline constexpr const char* kBreakdownHeader = "R,distance";
inline constexpr const char* kPerturbationHeader = "epsilon,displacement";
inline constexpr const char* kTraceHeader = "iteration,objective,residual";

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_breakdown_csv(std::ostream& out, const BreakdownTable& table);
void write_perturbation_csv(std::ostream& out, const PerturbationTable& table);
void write_trace_csv(std::ostream& out, const SolverReport& report);

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line chart with axes, ticks and a legend.
std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series);

/// Mean error over trials against α, one polyline per estimator.
std::string sweep_chart_svg(const SweepResult& result, const std::string& title);

}  // namespace pmedian::cli
