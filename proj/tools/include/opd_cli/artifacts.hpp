#pragma once

#include "opd/trace.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace opd::cli {

inline constexpr const char* kTraceFile = "trace.jsonl";
inline constexpr const char* kMetricsFile = "metrics.csv";
inline constexpr const char* kPlotFile = "convergence.svg";
inline constexpr const char* kSummaryFile = "summary.json";

/// Shortest decimal that round-trips; "" for NaN.
std::string format_number(double v);

/// One trace line: method, iter, distance, lagrangian, constraint_values,
/// lambda, phi, bound, inner_steps, policy. Missing values are null.
nlohmann::json record_to_json(const TraceRecord& record, const std::string& method);

/// Initial record plus every iteration, for each trace in order.
void write_trace_jsonl(const std::filesystem::path& path,
                       const std::vector<const ConvergenceTrace*>& traces);

/// Flat projection of the trace lines; constraint_j and lambda_j columns are
/// sized by the widest trace.
std::string metrics_csv(const std::vector<const ConvergenceTrace*>& traces);

void write_text(const std::filesystem::path& path, const std::string& text);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

/// Panels stacked vertically in a fixed 960x540 viewport. Non-positive values
/// are dropped from log-scale panels.
std::string render_svg(const std::string& title, const std::vector<Panel>& panels);

}  // namespace opd::cli
