#pragma once

// CSV and SVG report writers.  All numbers go through fmt17 (shortest
// round-trippable %.17g) so output is byte-stable across runs and worker
// counts; nothing here depends on locale state.

#include "horomass/common.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace horomass {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
      throw ValidationError("table row width " + std::to_string(row.size()) +
                            " does not match header width " + std::to_string(header.size()));
    rows.push_back(std::move(row));
  }
};

inline std::string to_csv(const Table& table) {
  std::string out;
  const auto emit = [&out](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  return out;
}

// One sweep point for the mass-style CSV schema.
struct SweepRow {
  double param = 0.0;
  double value = 0.0;
  double quad_error = 0.0;
  double tail_bound = 0.0;
};

struct SweepFitSummary {
  bool valid = false;        // a three-point fit was attempted and converged
  double limit = 0.0;
  bool rate_valid = false;
  double rate = 0.0;
  double residual = 0.0;
};

// Schema shared by `mass` and `theta`:
//   evaluator,param_name,param_value,value,quad_error,tail_bound,extrapolated,fit_rate,fit_residual
// Fit columns are filled on the final row of the sweep and left empty above it.
inline Table sweep_table(const std::string& evaluator, const std::string& param_name,
                         const std::vector<SweepRow>& rows, const SweepFitSummary& fit) {
  Table t;
  t.header = {"evaluator", "param_name", "param_value", "value",   "quad_error",
              "tail_bound", "extrapolated", "fit_rate",  "fit_residual"};
  for (size_t i = 0; i < rows.size(); ++i) {
    const bool last = (i + 1 == rows.size());
    const SweepRow& r = rows[i];
    std::vector<std::string> cells = {evaluator,          param_name,
                                      fmt17(r.param),     fmt17(r.value),
                                      fmt17(r.quad_error), fmt17(r.tail_bound),
                                      "",                 "",
                                      ""};
    if (last && fit.valid) {
      cells[6] = fmt17(fit.limit);
      if (fit.rate_valid) cells[7] = fmt17(fit.rate);
      cells[8] = fmt17(fit.residual);
    }
    t.add_row(std::move(cells));
  }
  return t;
}

// Minimal self-contained line chart: one polyline of value vs parameter plus
// an optional dashed horizontal rule at the extrapolated limit.
struct ChartSeries {
  std::vector<double> x;
  std::vector<double> y;
};

inline std::string svg_line_chart(const std::string& title, const std::string& x_label,
                                  const std::string& y_label, const ChartSeries& series,
                                  bool have_limit, double limit) {
  if (series.x.size() != series.y.size() || series.x.size() < 2)
    throw ValidationError("svg chart needs at least two (x, y) points");

  const double width = 640.0, height = 400.0;
  const double ml = 70.0, mr = 20.0, mt = 40.0, mb = 50.0;

  double x_lo = series.x.front(), x_hi = series.x.front();
  double y_lo = series.y.front(), y_hi = series.y.front();
  for (size_t i = 0; i < series.x.size(); ++i) {
    x_lo = std::min(x_lo, series.x[i]);
    x_hi = std::max(x_hi, series.x[i]);
    y_lo = std::min(y_lo, series.y[i]);
    y_hi = std::max(y_hi, series.y[i]);
  }
  if (have_limit) {
    y_lo = std::min(y_lo, limit);
    y_hi = std::max(y_hi, limit);
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  const double pad = (y_hi == y_lo) ? std::max(1.0, std::abs(y_lo)) * 0.1 : (y_hi - y_lo) * 0.08;
  y_lo -= pad;
  y_hi += pad;

  const auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (width - ml - mr); };
  const auto py = [&](double y) {
    return height - mb - (y - y_lo) / (y_hi - y_lo) * (height - mt - mb);
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_short(width) + "\" height=\"" +
       fmt_short(height) + "\" viewBox=\"0 0 " + fmt_short(width) + " " + fmt_short(height) +
       "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt_short(width / 2) + "\" y=\"22\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";

  // Axes.
  s += "<line x1=\"" + fmt_short(ml) + "\" y1=\"" + fmt_short(height - mb) + "\" x2=\"" +
       fmt_short(width - mr) + "\" y2=\"" + fmt_short(height - mb) +
       "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  s += "<line x1=\"" + fmt_short(ml) + "\" y1=\"" + fmt_short(mt) + "\" x2=\"" + fmt_short(ml) +
       "\" y2=\"" + fmt_short(height - mb) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double fx = x_lo + (x_hi - x_lo) * i / n_ticks;
    const double fy = y_lo + (y_hi - y_lo) * i / n_ticks;
    s += "<line x1=\"" + fmt_short(px(fx)) + "\" y1=\"" + fmt_short(height - mb) + "\" x2=\"" +
         fmt_short(px(fx)) + "\" y2=\"" + fmt_short(height - mb + 5) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + fmt_short(px(fx)) + "\" y=\"" + fmt_short(height - mb + 20) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + fmt_short(fx) +
         "</text>\n";
    s += "<line x1=\"" + fmt_short(ml - 5) + "\" y1=\"" + fmt_short(py(fy)) + "\" x2=\"" +
         fmt_short(ml) + "\" y2=\"" + fmt_short(py(fy)) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + fmt_short(ml - 9) + "\" y=\"" + fmt_short(py(fy) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt_short(fy) +
         "</text>\n";
  }

  s += "<text x=\"" + fmt_short((ml + width - mr) / 2) + "\" y=\"" + fmt_short(height - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + x_label +
       "</text>\n";
  s += "<text x=\"16\" y=\"" + fmt_short((mt + height - mb) / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
       fmt_short((mt + height - mb) / 2) + ")\">" + y_label + "</text>\n";

  if (have_limit) {
    s += "<line x1=\"" + fmt_short(ml) + "\" y1=\"" + fmt_short(py(limit)) + "\" x2=\"" +
         fmt_short(width - mr) + "\" y2=\"" + fmt_short(py(limit)) +
         "\" stroke=\"#c02020\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
    s += "<text x=\"" + fmt_short(width - mr - 4) + "\" y=\"" + fmt_short(py(limit) - 5) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#c02020\">limit " +
         fmt_short(limit) + "</text>\n";
  }

  s += "<polyline fill=\"none\" stroke=\"#2050c0\" stroke-width=\"1.5\" points=\"";
  for (size_t i = 0; i < series.x.size(); ++i) {
    if (i) s += ' ';
    s += fmt_short(px(series.x[i])) + "," + fmt_short(py(series.y[i]));
  }
  s += "\"/>\n";
  for (size_t i = 0; i < series.x.size(); ++i)
    s += "<circle cx=\"" + fmt_short(px(series.x[i])) + "\" cy=\"" + fmt_short(py(series.y[i])) +
         "\" r=\"2.5\" fill=\"#2050c0\"/>\n";

  s += "</svg>\n";
  return s;
}

}  // namespace horomass
