#pragma once

// Serialization of traces, phase profiles, distribution reports and
// convergence tables (CSV, JSON) plus a dependency-free SVG ratio plot.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ultraflat/generators.hpp"
#include "ultraflat/phase.hpp"
#include "ultraflat/report.hpp"
#include "ultraflat/theorems.hpp"

namespace ultraflat {

namespace detail {

// JSON has no nan/inf; those become null.
inline nlohmann::ordered_json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

inline nlohmann::ordered_json json_numbers(std::span<const double> xs) {
  auto arr = nlohmann::ordered_json::array();
  for (double x : xs) arr.push_back(json_number(x));
  return arr;
}

inline std::string optional_cell(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string();
}

}  // namespace detail

// JSON text with 17 significant digits for every double.
inline std::string dump_json(const nlohmann::ordered_json& j) {
  return j.dump(1) + "\n";
}

inline std::string trace_csv(const FlattenerTrace& trace) {
  CsvWriter csv{"iter", "eps"};
  for (std::size_t i = 0; i < trace.eps_history.size(); ++i) {
    csv.row_strings({std::to_string(i), format_double(trace.eps_history[i])});
  }
  return csv.str();
}

inline nlohmann::ordered_json trace_summary_json(const FlattenerTrace& trace) {
  nlohmann::ordered_json j;
  j["iterations"] = trace.iterations;
  j["converged"] = trace.converged;
  j["final_eps"] = detail::json_number(trace.final_eps);
  j["projection_steps"] = trace.projection_steps;
  j["descent_steps"] = trace.descent_steps;
  j["restarts"] = trace.restarts;
  return j;
}

inline nlohmann::ordered_json flatness_json(const FlatnessReport& r) {
  nlohmann::ordered_json j;
  j["degree"] = r.degree;
  j["grid_size"] = r.grid_size;
  j["eps"] = detail::json_number(r.eps);
  j["eps_grid"] = detail::json_number(r.eps_grid);
  j["slack"] = detail::json_number(r.slack);
  j["max_modulus_bound"] = detail::json_number(r.max_modulus_bound);
  j["min_modulus_bound"] = detail::json_number(r.min_modulus_bound);
  return j;
}

inline std::string phase_csv(const PhaseProfile& p) {
  CsvWriter csv{"t", "R", "alpha", "alpha_prime", "beta"};
  for (std::size_t j = 0; j < p.grid_size; ++j) {
    csv.row_strings({format_double(grid_point(j, p.grid_size)), format_double(p.R[j]),
                     format_double(p.alpha[j]), format_double(p.alpha_prime[j]),
                     format_double(p.beta[j])});
  }
  return csv.str();
}

inline nlohmann::ordered_json distribution_json(const DistributionReport& d) {
  nlohmann::ordered_json j;
  j["n"] = d.n;
  j["sup_deviation"] = detail::json_number(d.sup_deviation);
  j["sup_deviation_over_2pi"] = detail::json_number(d.sup_deviation / kTwoPi);
  j["xs"] = detail::json_numbers(d.xs);
  j["measure"] = detail::json_numbers(d.measure);
  return j;
}

inline std::string convergence_csv(std::span<const ConvergenceTable> tables) {
  CsvWriter csv{"theorem", "q",    "n",          "eps",         "lhs",
                "rhs",     "ratio", "degenerate", "twin",        "twin_defect",
                "excluded_measure"};
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      csv.row_strings({std::string(to_string(r.id)), detail::optional_cell(r.q),
                       std::to_string(r.n), format_double(r.eps_achieved),
                       format_double(r.lhs), format_double(r.rhs),
                       format_double(r.ratio), r.degenerate ? "1" : "0",
                       detail::optional_cell(r.twin),
                       detail::optional_cell(r.twin_defect),
                       format_double(r.excluded_measure)});
    }
  }
  return csv.str();
}

inline nlohmann::ordered_json verdict_json(const TheoremVerdict& r) {
  nlohmann::ordered_json j;
  j["theorem"] = std::string(to_string(r.id));
  j["q"] = r.q ? nlohmann::ordered_json(*r.q) : nlohmann::ordered_json(nullptr);
  j["n"] = r.n;
  j["eps"] = detail::json_number(r.eps_achieved);
  j["lhs"] = detail::json_number(r.lhs);
  j["rhs"] = detail::json_number(r.rhs);
  j["ratio"] = detail::json_number(r.ratio);
  j["degenerate"] = r.degenerate;
  if (r.twin) j["twin"] = detail::json_number(*r.twin);
  if (r.twin_defect) j["twin_defect"] = detail::json_number(*r.twin_defect);
  j["excluded_measure"] = detail::json_number(r.excluded_measure);
  return j;
}

inline nlohmann::ordered_json convergence_json(std::span<const ConvergenceTable> tables) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& t : tables) {
    nlohmann::ordered_json j;
    j["theorem"] = std::string(to_string(t.id));
    j["q"] = t.q ? nlohmann::ordered_json(*t.q) : nlohmann::ordered_json(nullptr);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) rows.push_back(verdict_json(r));
    j["rows"] = std::move(rows);
    nlohmann::ordered_json trend;
    trend["ns"] = t.trend.ns;
    trend["deviation"] = detail::json_numbers(t.trend.deviation);
    trend["smoothed"] = detail::json_numbers(t.trend.smoothed);
    trend["nonincreasing"] = t.trend.nonincreasing;
    j["trend"] = std::move(trend);
    arr.push_back(std::move(j));
  }
  return arr;
}

// Ratio against n (log2 axis) with one polyline per table.
inline std::string ratio_plot_svg(std::span<const ConvergenceTable> tables,
                                  const std::string& title) {
  constexpr double width = 640, height = 400;
  constexpr double left = 70, right = 150, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      if (r.n == 0 || !std::isfinite(r.ratio)) continue;
      const double x = std::log2(static_cast<double>(r.n));
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, r.ratio);
      ymax = std::max(ymax, r.ratio);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  ymin = std::min(ymin, 0.0);
  ymax = std::max(ymax, 1.0);
  if (xmax - xmin < 1e-9) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto sx = [&](double x) { return left + pw * (x - xmin) / (xmax - xmin); };
  auto sy = [&](double y) { return top + ph * (1.0 - (y - ymin) / (ymax - ymin)); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto label = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };

  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                            "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
       "\" height=\"" + num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(left + pw / 2) + "\" y=\"22\" text-anchor=\"middle\">" + title +
       "</text>\n";
  s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) +
       "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  if (1.0 >= ymin && 1.0 <= ymax) {
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(sy(1.0)) + "\" x2=\"" +
         num(left + pw) + "\" y2=\"" + num(sy(1.0)) +
         "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = ymin + (ymax - ymin) * i / 4.0;
    s += "<text x=\"" + num(left - 6) + "\" y=\"" + num(sy(y) + 4) +
         "\" text-anchor=\"end\">" + label(y) + "</text>\n";
  }
  for (double x = std::ceil(xmin); x <= std::floor(xmax); x += 1.0) {
    s += "<text x=\"" + num(sx(x)) + "\" y=\"" + num(top + ph + 16) +
         "\" text-anchor=\"middle\">" + label(std::exp2(x)) + "</text>\n";
  }
  s += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 10) +
       "\" text-anchor=\"middle\">n (log scale)</text>\n";
  s += "<text x=\"16\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num(top + ph / 2) + ")\">lhs / rhs</text>\n";

  for (std::size_t k = 0; k < tables.size(); ++k) {
    const auto& t = tables[k];
    const char* color = palette[k % std::size(palette)];
    std::string points;
    for (const auto& r : t.rows) {
      if (r.n == 0 || !std::isfinite(r.ratio)) continue;
      if (!points.empty()) points += ' ';
      points += num(sx(std::log2(static_cast<double>(r.n)))) + "," + num(sy(r.ratio));
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
         "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    std::string name(to_string(t.id));
    if (t.q) name += " q=" + label(*t.q);
    const double ly = top + 16 + 18.0 * static_cast<double>(k);
    s += "<line x1=\"" + num(left + pw + 12) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
         num(left + pw + 32) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(left + pw + 38) + "\" y=\"" + num(ly) + "\">" + name + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace ultraflat
