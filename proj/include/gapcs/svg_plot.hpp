#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "gapcs/csv.hpp"
#include "gapcs/errors.hpp"

namespace gapcs {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  bool scatter = false;
};

namespace detail {

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

inline const char* plot_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
                                  "#bcbd22", "#e377c2"};
  return palette[i % 10];
}

}  // namespace detail

/// Deterministic standalone SVG chart: identical inputs give identical bytes.
inline void write_plot_svg(const std::filesystem::path& path,
                           const std::vector<PlotSeries>& series,
                           const PlotOptions& options) {
  const double width = 720, height = 480;
  const double left = 80, right = 700, top = 50, bottom = 430;

  auto tx = [&](double v) { return options.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return options.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    if (options.log_x && x <= 0.0) return false;
    if (options.log_y && y <= 0.0) return false;
    return true;
  };

  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  bool any = false;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!usable(x, y)) continue;
      const double px = tx(x), py = ty(y);
      if (!any) {
        x_min = x_max = px;
        y_min = y_max = py;
        any = true;
      } else {
        x_min = std::min(x_min, px);
        x_max = std::max(x_max, px);
        y_min = std::min(y_min, py);
        y_max = std::max(y_max, py);
      }
    }
  }
  if (!any) throw ParseError("no plottable data for " + path.string());
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;

  auto px_of = [&](double v) {
    return left + (tx(v) - x_min) / (x_max - x_min) * (right - left);
  };
  auto py_of = [&](double v) {
    return bottom - (ty(v) - y_min) / (y_max - y_min) * (bottom - top);
  };

  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"360\" y=\"28\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">"
      << options.title << "</text>\n";

  // axes
  out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
      << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";

  auto emit_ticks = [&](bool on_x) {
    const bool log_axis = on_x ? options.log_x : options.log_y;
    const double lo = on_x ? x_min : y_min;
    const double hi = on_x ? x_max : y_max;
    std::vector<double> ticks;  // in transformed space
    if (log_axis) {
      const int e_lo = static_cast<int>(std::ceil(lo - 1e-9));
      const int e_hi = static_cast<int>(std::floor(hi + 1e-9));
      const int step = std::max(1, (e_hi - e_lo) / 8 + 1);
      for (int e = e_lo; e <= e_hi; e += step) ticks.push_back(e);
      if (ticks.empty()) ticks = {lo, hi};
    } else {
      for (int i = 0; i <= 4; ++i) ticks.push_back(lo + (hi - lo) * i / 4.0);
    }
    for (const double t : ticks) {
      const double value = log_axis ? std::pow(10.0, t) : t;
      if (on_x) {
        const double x = left + (t - x_min) / (x_max - x_min) * (right - left);
        out << "<line x1=\"" << detail::fixed2(x) << "\" y1=\"" << bottom
            << "\" x2=\"" << detail::fixed2(x) << "\" y2=\"" << bottom + 5
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << detail::fixed2(x) << "\" y=\"" << bottom + 20
            << "\" text-anchor=\"middle\" font-size=\"11\" "
               "font-family=\"sans-serif\">"
            << detail::tick_label(value) << "</text>\n";
      } else {
        const double y = bottom - (t - y_min) / (y_max - y_min) * (bottom - top);
        out << "<line x1=\"" << left - 5 << "\" y1=\"" << detail::fixed2(y)
            << "\" x2=\"" << left << "\" y2=\"" << detail::fixed2(y)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << detail::fixed2(y + 4)
            << "\" text-anchor=\"end\" font-size=\"11\" "
               "font-family=\"sans-serif\">"
            << detail::tick_label(value) << "</text>\n";
      }
    }
  };
  emit_ticks(true);
  emit_ticks(false);

  out << "<text x=\"390\" y=\"465\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\">"
      << options.xlabel << "</text>\n";
  out << "<text x=\"20\" y=\"240\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\" transform=\"rotate(-90 20 240)\">"
      << options.ylabel << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = detail::plot_color(si);
    if (options.scatter) {
      for (const auto& [x, y] : series[si].points) {
        if (!usable(x, y)) continue;
        out << "<circle cx=\"" << detail::fixed2(px_of(x)) << "\" cy=\""
            << detail::fixed2(py_of(y)) << "\" r=\"3\" fill=\"" << color
            << "\" fill-opacity=\"0.7\"/>\n";
      }
    } else {
      std::string points;
      for (const auto& [x, y] : series[si].points) {
        if (!usable(x, y)) continue;
        points += detail::fixed2(px_of(x)) + "," + detail::fixed2(py_of(y)) +
                  " ";
      }
      if (!points.empty()) {
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
      }
    }
    const double ly = top + 16.0 * static_cast<double>(si);
    out << "<line x1=\"" << right - 150 << "\" y1=\"" << detail::fixed2(ly)
        << "\" x2=\"" << right - 130 << "\" y2=\"" << detail::fixed2(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
    out << "<text x=\"" << right - 125 << "\" y=\"" << detail::fixed2(ly + 4)
        << "\" font-size=\"11\" font-family=\"sans-serif\">"
        << series[si].label << "</text>\n";
  }
  out << "</svg>\n";
}

namespace detail {

inline PlotSeries median_trace_series(const CsvTable& table,
                                      const std::string& label) {
  PlotSeries series;
  series.label = label;
  const int iter_col = table.column_index("iter");
  if (iter_col < 0) throw ParseError("convergence CSV lacks iter column");
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<double> values;
    for (int c = 0; c < static_cast<int>(table.columns.size()); ++c) {
      if (c == iter_col) continue;
      const double v = table.number(r, c);
      if (std::isfinite(v)) values.push_back(v);
    }
    if (values.empty()) continue;
    series.points.emplace_back(table.number(r, iter_col), median(values));
  }
  return series;
}

inline std::vector<PlotSeries> sweep_series(const CsvTable& table,
                                            const std::string& value_column) {
  const int vcol = table.column_index(value_column);
  const int acol = table.column_index("algorithm");
  const int ccol = table.column_index("condition");
  const int ecol = table.column_index("final_err");
  if (vcol < 0 || acol < 0 || ccol < 0 || ecol < 0) {
    throw ParseError("sweep CSV lacks expected columns");
  }
  // (algorithm, condition) -> value -> errors
  std::map<std::string, std::map<double, std::vector<double>>> groups;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string key = table.text(r, acol) + " " + table.text(r, ccol);
    groups[key][table.number(r, vcol)].push_back(table.number(r, ecol));
  }
  std::vector<PlotSeries> series;
  for (const auto& [key, by_value] : groups) {
    PlotSeries s;
    s.label = key;
    for (const auto& [value, errors] : by_value) {
      s.points.emplace_back(value, median(errors));
    }
    series.push_back(std::move(s));
  }
  return series;
}

}  // namespace detail

/// Renders every known CSV in csv_dir into SVGs under out_dir; returns the
/// files written. Malformed or empty CSVs raise ParseError and write nothing.
inline std::vector<std::filesystem::path> render_plots(
    const std::filesystem::path& csv_dir,
    const std::filesystem::path& out_dir) {
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(csv_dir)) {
    if (entry.path().extension() == ".csv")
      names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  // convergence traces, grouped by noise condition
  for (const std::string condition : {"noiseless", "noisy"}) {
    std::vector<PlotSeries> series;
    for (const std::string& name : names) {
      const std::string suffix = "_" + condition + ".csv";
      if (name.rfind("convergence_", 0) != 0 || name.find("summary") != std::string::npos)
        continue;
      if (name.size() < suffix.size() ||
          name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
        continue;
      std::string label =
          name.substr(12, name.size() - 12 - suffix.size());
      const std::size_t tag = label.find("_alpha");
      if (tag != std::string::npos) label.replace(tag, 6, " alpha=");
      series.push_back(detail::median_trace_series(
          CsvTable::load(csv_dir / name), label));
    }
    if (series.empty()) continue;
    PlotOptions options;
    options.title = "squared error vs iteration (" + condition + ")";
    options.xlabel = "iteration";
    options.ylabel = "||w - x*||^2 (median)";
    options.log_y = true;
    const auto path = out_dir / ("convergence_" + condition + ".svg");
    write_plot_svg(path, series, options);
    written.push_back(path);
  }

  for (const auto& [file, column, title] :
       {std::tuple{"mstar_sweep.csv", "m_star", "final error vs support budget"},
        std::tuple{"k_sweep.csv", "k", "final error vs sparsity"}}) {
    if (std::find(names.begin(), names.end(), file) == names.end()) continue;
    const auto table = CsvTable::load(csv_dir / file);
    PlotOptions options;
    options.title = title;
    options.xlabel = column;
    options.ylabel = "final ||w - x*||^2 (median)";
    options.log_y = true;
    const auto path =
        out_dir / (std::string(file).substr(0, std::string(file).size() - 4) +
                   ".svg");
    write_plot_svg(path, detail::sweep_series(table, column), options);
    written.push_back(path);
  }

  if (std::find(names.begin(), names.end(), "noise_est.csv") != names.end()) {
    const auto table = CsvTable::load(csv_dir / "noise_est.csv");
    const int tcol = table.column_index("true_std");
    const int ecol = table.column_index("estimated_std");
    if (tcol < 0 || ecol < 0) throw ParseError("noise_est.csv lacks columns");
    PlotSeries cloud;
    cloud.label = "estimates";
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const double t = table.number(r, tcol);
      cloud.points.emplace_back(t, table.number(r, ecol));
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    PlotSeries identity;
    identity.label = "truth";
    identity.points = {{lo, lo}, {hi, hi}};
    PlotOptions options;
    options.title = "estimated vs true noise std";
    options.xlabel = "true std";
    options.ylabel = "estimated std";
    options.log_x = options.log_y = true;
    options.scatter = true;
    const auto path = out_dir / "noise_est.svg";
    write_plot_svg(path, {identity, cloud}, options);
    written.push_back(path);
  }

  if (std::find(names.begin(), names.end(), "image_trace.csv") != names.end()) {
    const auto table = CsvTable::load(csv_dir / "image_trace.csv");
    const int iter = table.column_index("iter");
    if (iter < 0) throw ParseError("image_trace.csv lacks iter column");
    auto line_of = [&](const std::string& column) {
      PlotSeries s;
      s.label = column;
      const int c = table.column_index(column);
      if (c < 0) return s;
      for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const double v = table.number(r, c);
        if (std::isfinite(v)) s.points.emplace_back(table.number(r, iter), v);
      }
      return s;
    };
    PlotOptions psnr_options;
    psnr_options.title = "reconstruction PSNR vs iteration";
    psnr_options.xlabel = "iteration";
    psnr_options.ylabel = "PSNR (dB)";
    const auto psnr_path = out_dir / "image_psnr.svg";
    write_plot_svg(psnr_path, {line_of("psnr_gap"), line_of("psnr_ait")},
                   psnr_options);
    written.push_back(psnr_path);
    PlotOptions err_options;
    err_options.title = "reconstruction error vs iteration";
    err_options.xlabel = "iteration";
    err_options.ylabel = "||w - x||^2";
    err_options.log_y = true;
    const auto err_path = out_dir / "image_err.svg";
    write_plot_svg(err_path, {line_of("err_gap"), line_of("err_ait")},
                   err_options);
    written.push_back(err_path);
  }

  return written;
}

}  // namespace gapcs
