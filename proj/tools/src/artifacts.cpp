#include "opd_cli/artifacts.hpp"

#include "opd/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace opd::cli {

namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string compact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape_xml(const std::string& s) {
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

constexpr const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return !(lo <= hi); }
};

void render_panel(std::ostringstream& os, const Panel& panel, double top, double height) {
  constexpr double left = 90.0;
  constexpr double plot_width = 960.0 - left - 190.0;
  const double plot_top = top + 26.0;
  const double plot_height = height - 26.0 - 40.0;

  Range xr;
  Range yr;
  for (const auto& s : panel.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double y = s.y[i];
      if (!std::isfinite(y) || !std::isfinite(s.x[i])) continue;
      if (panel.log_y && !(y > 0.0)) continue;
      xr.add(s.x[i]);
      yr.add(panel.log_y ? std::log10(y) : y);
    }
  }
  if (xr.empty()) xr = {0.0, 1.0};
  if (yr.empty()) yr = {0.0, 1.0};
  if (panel.log_y) {
    yr.lo = std::floor(yr.lo);
    yr.hi = std::ceil(yr.hi);
  }
  if (xr.hi == xr.lo) xr.hi = xr.lo + 1.0;
  if (yr.hi == yr.lo) {
    yr.lo -= 0.5;
    yr.hi += 0.5;
  }
  auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * plot_width; };
  auto py = [&](double y) {
    return plot_top + plot_height - (y - yr.lo) / (yr.hi - yr.lo) * plot_height;
  };

  os << "<text x=\"" << fixed(left, 1) << "\" y=\"" << fixed(top + 18.0, 1)
     << "\" font-size=\"14\" font-weight=\"bold\">" << escape_xml(panel.title) << "</text>\n";
  os << "<rect x=\"" << fixed(left, 1) << "\" y=\"" << fixed(plot_top, 1) << "\" width=\""
     << fixed(plot_width, 1) << "\" height=\"" << fixed(plot_height, 1)
     << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // y ticks: decades on log panels, five even steps otherwise.
  std::vector<double> yticks;
  if (panel.log_y) {
    const int lo = static_cast<int>(yr.lo);
    const int hi = static_cast<int>(yr.hi);
    const int stride = std::max(1, (hi - lo) / 6);
    for (int e = lo; e <= hi; e += stride) yticks.push_back(e);
  } else {
    for (int i = 0; i <= 4; ++i) yticks.push_back(yr.lo + (yr.hi - yr.lo) * i / 4.0);
  }
  for (double t : yticks) {
    const double y = py(t);
    const std::string label =
        panel.log_y ? "1e" + std::to_string(static_cast<int>(t)) : compact(t);
    os << "<line x1=\"" << fixed(left - 4.0, 1) << "\" y1=\"" << fixed(y, 1) << "\" x2=\""
       << fixed(left, 1) << "\" y2=\"" << fixed(y, 1) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << fixed(left - 7.0, 1) << "\" y=\"" << fixed(y + 4.0, 1)
       << "\" font-size=\"10\" text-anchor=\"end\">" << label << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double t = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double x = px(t);
    os << "<line x1=\"" << fixed(x, 1) << "\" y1=\"" << fixed(plot_top + plot_height, 1)
       << "\" x2=\"" << fixed(x, 1) << "\" y2=\"" << fixed(plot_top + plot_height + 4.0, 1)
       << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << fixed(x, 1) << "\" y=\"" << fixed(plot_top + plot_height + 16.0, 1)
       << "\" font-size=\"10\" text-anchor=\"middle\">" << fixed(t, 0) << "</text>\n";
  }
  os << "<text x=\"" << fixed(left + plot_width / 2.0, 1) << "\" y=\""
     << fixed(plot_top + plot_height + 32.0, 1) << "\" font-size=\"11\" text-anchor=\"middle\">"
     << escape_xml(panel.x_label) << "</text>\n";
  const double label_y = plot_top + plot_height / 2.0;
  os << "<text x=\"18\" y=\"" << fixed(label_y, 1)
     << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << fixed(label_y, 1)
     << ")\">" << escape_xml(panel.y_label) << "</text>\n";

  for (std::size_t k = 0; k < panel.series.size(); ++k) {
    const auto& s = panel.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      double y = s.y[i];
      if (!std::isfinite(y) || (panel.log_y && !(y > 0.0))) continue;
      if (panel.log_y) y = std::log10(y);
      if (!first) os << ' ';
      first = false;
      os << fixed(px(s.x[i]), 2) << ',' << fixed(py(y), 2);
    }
    os << "\"/>\n";
    const double ly = plot_top + 12.0 + 16.0 * static_cast<double>(k);
    os << "<line x1=\"" << fixed(left + plot_width + 12.0, 1) << "\" y1=\"" << fixed(ly, 1)
       << "\" x2=\"" << fixed(left + plot_width + 32.0, 1) << "\" y2=\"" << fixed(ly, 1)
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fixed(left + plot_width + 36.0, 1) << "\" y=\"" << fixed(ly + 4.0, 1)
       << "\" font-size=\"10\">" << escape_xml(s.label) << "</text>\n";
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json record_to_json(const TraceRecord& r, const std::string& method) {
  json j;
  j["method"] = method;
  j["iter"] = r.iter;
  j["distance"] = optional_number(r.distance);
  j["lagrangian"] = r.lagrangian;
  j["constraint_values"] = vector_json(r.constraint_values);
  j["lambda"] = vector_json(r.lambda.lambdas);
  j["phi"] = optional_number(r.phi);
  j["bound"] = optional_number(r.bound);
  j["inner_steps"] = r.inner_steps;
  json rows = json::array();
  for (Eigen::Index x = 0; x < r.policy.num_prompts(); ++x) {
    const auto row = r.policy.row(x);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["policy"] = std::move(rows);
  return j;
}

void write_trace_jsonl(const std::filesystem::path& path,
                       const std::vector<const ConvergenceTrace*>& traces) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (const auto* t : traces) {
    out << record_to_json(t->initial, t->method).dump() << '\n';
    for (const auto& r : t->records) out << record_to_json(r, t->method).dump() << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

std::string metrics_csv(const std::vector<const ConvergenceTrace*>& traces) {
  Eigen::Index width = 0;
  for (const auto* t : traces) width = std::max(width, t->initial.lambda.size());
  std::ostringstream os;
  os << "method,iter,distance,lagrangian,phi,bound,inner_steps";
  for (Eigen::Index j = 0; j < width; ++j) os << ",constraint_" << j;
  for (Eigen::Index j = 0; j < width; ++j) os << ",lambda_" << j;
  os << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  auto row = [&](const std::string& method, const TraceRecord& r) {
    os << method << ',' << r.iter << ',' << opt(r.distance) << ',' << format_number(r.lagrangian)
       << ',' << opt(r.phi) << ',' << opt(r.bound) << ',' << r.inner_steps;
    for (Eigen::Index j = 0; j < width; ++j)
      os << ',' << (j < r.constraint_values.size() ? format_number(r.constraint_values[j]) : "");
    for (Eigen::Index j = 0; j < width; ++j)
      os << ',' << (j < r.lambda.size() ? format_number(r.lambda[j]) : "");
    os << '\n';
  };
  for (const auto* t : traces) {
    row(t->method, t->initial);
    for (const auto& r : t->records) row(t->method, r);
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string render_svg(const std::string& title, const std::vector<Panel>& panels) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"540\" "
        "viewBox=\"0 0 960 540\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"960\" height=\"540\" fill=\"white\"/>\n";
  os << "<text x=\"480\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">" << escape_xml(title)
     << "</text>\n";
  const double top = 28.0;
  const double each = (540.0 - top) / static_cast<double>(std::max<std::size_t>(1, panels.size()));
  for (std::size_t i = 0; i < panels.size(); ++i)
    render_panel(os, panels[i], top + each * static_cast<double>(i), each);
  os << "</svg>\n";
  return os.str();
}

}  // namespace opd::cli
