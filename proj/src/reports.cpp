/*
 * Copyright (c) 2026 The scitrace Authors. All Rights Reserved
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <limits>

#include "scitrace/pipeline.hpp"

namespace scitrace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kKindNames[] = {"ranks", "trajectories", "neighbors", "diversity",
                                           "aoc",   "homophily",    "communities", "stats"};
constexpr std::string_view kKindStages[] = {"rank", "trajectory", "neighbors", "diversity",
                                            "aoc",  "homophily",  "communities", "stats"};
constexpr std::string_view kFormatNames[] = {"csv", "json", "svg"};

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) { return format_real(std::round(v * 100.0) / 100.0, 8); }

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  bool invert_y = false;
  double px(double x) const { return kLeft + (x1 == x0 ? 0.5 : (x - x0) / (x1 - x0)) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    double t = y1 == y0 ? 0.5 : (y - y0) / (y1 - y0);
    if (invert_y) t = 1.0 - t;
    return kHeight - kBottom - t * (kHeight - kTop - kBottom);
  }
};

std::string svg_open(std::string_view title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + "<text x=\"" + num(kWidth / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + xml_escape(title) + "</text>\n";
}

std::string axes(const Frame& f) {
  const double l = kLeft, r = kWidth - kRight, t = kTop, b = kHeight - kBottom;
  return "<path d=\"M" + num(l) + " " + num(t) + " L" + num(l) + " " + num(b) + " L" + num(r) + " " + num(b) +
         "\" stroke=\"black\" fill=\"none\"/>\n" + "<text x=\"" + num(l - 6) + "\" y=\"" + num(f.py(f.y0)) +
         "\" text-anchor=\"end\">" + format_real(f.y0, 4) + "</text>\n" + "<text x=\"" +
         num(l - 6) + "\" y=\"" + num(f.py(f.y1)) + "\" text-anchor=\"end\">" + format_real(f.y1, 4) + "</text>\n";
}

std::string legend(std::span<const SvgSeries> series) {
  std::string out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 14.0 * static_cast<double>(i);
    const auto* color = kPalette[i % std::size(kPalette)];
    out += "<rect x=\"" + num(kWidth - kRight + 10) + "\" y=\"" + num(y - 8) + "\" width=\"10\" height=\"10\" fill=\"" +
           color + "\"/>\n<text x=\"" + num(kWidth - kRight + 24) + "\" y=\"" + num(y) + "\">" +
           xml_escape(series[i].name) + "</text>\n";
  }
  return out;
}

Frame fit(std::span<const SvgSeries> series) {
  Frame f{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      f.x0 = std::min(f.x0, x);
      f.x1 = std::max(f.x1, x);
      f.y0 = std::min(f.y0, y);
      f.y1 = std::max(f.y1, y);
    }
  if (!std::isfinite(f.x0)) f = {0, 1, 0, 1};
  return f;
}

ordered_json read_artifact(const fs::path& path, ReportKind kind) {
  if (!fs::exists(path))
    throw Error(ErrorKind::missing_prerequisite,
                "missing artifact: " + std::string(report_kind_name(kind)) + " (run '" +
                    std::string(kKindStages[static_cast<std::size_t>(kind)]) + "' first)");
  auto j = ordered_json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::validation, "not valid JSON: " + path.string());
  return j;
}

std::string ranks_svg(const ordered_json& j) {
  // Keywords ranked in the latest snapshot with a non-empty table, at most ten.
  std::vector<std::string> labels;
  std::vector<std::string> keywords;
  for (const auto& snap : j) labels.push_back(snap.at("snapshot").get<std::string>());
  for (auto it = j.rbegin(); it != j.rend() && keywords.empty(); ++it)
    for (const auto& row : it->at("rows")) {
      if (keywords.size() == 10) break;
      keywords.push_back(row.at("keyword").get<std::string>());
    }
  std::vector<SvgSeries> series;
  for (const auto& kw : keywords) {
    SvgSeries s{kw, {}};
    for (std::size_t t = 0; t < j.size(); ++t)
      for (const auto& row : j[t].at("rows"))
        if (row.at("keyword") == kw) s.points.push_back({static_cast<double>(t), row.at("rank").get<double>()});
    series.push_back(std::move(s));
  }
  return svg_line_plot("Keyword rank by snapshot", "snapshot", "rank", labels, series, true);
}

std::string trajectories_svg(const ordered_json& j) {
  std::vector<SvgSeries> series;
  for (const auto& t : j) {
    SvgSeries s{t.at("keyword").get<std::string>(), {}};
    for (const auto& p : t.at("points"))
      if (p.contains("xy") && p["xy"].is_array()) s.points.push_back({p["xy"][0].get<double>(), p["xy"][1].get<double>()});
    series.push_back(std::move(s));
  }
  return svg_scatter_plot("Keyword trajectories (t-SNE)", series);
}

std::string aoc_svg(const ordered_json& j) {
  std::vector<HistogramBin> bins;
  for (const auto& g : j.at("groups"))
    for (std::size_t i = 0; i < g.at("histogram").size(); ++i) {
      const auto& b = g["histogram"][i];
      if (bins.size() <= i) bins.push_back({b.at("bin_start").get<double>(), b.at("bin_end").get<double>(), 0});
      bins[i].count += b.at("count").get<std::size_t>();
    }
  return svg_histogram("Age of citation, all groups (years)", bins);
}

std::string diversity_svg(const ordered_json& j) {
  std::vector<HistogramBin> bins(10);
  for (std::size_t i = 0; i < bins.size(); ++i) bins[i] = {0.1 * static_cast<double>(i), 0.1 * static_cast<double>(i + 1), 0};
  for (const auto& r : j.at("rows")) {
    const double v = r.at("simpson").get<double>();
    bins[std::min<std::size_t>(9, static_cast<std::size_t>(std::max(0.0, v) * 10.0))].count++;
  }
  return svg_histogram("Simpson diversity (" + j.value("level", std::string()) + " level)", bins);
}

}  // namespace

ReportKind parse_report_kind(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i)
    if (kKindNames[i] == name) return static_cast<ReportKind>(i);
  throw Error(ErrorKind::invalid_argument, "unknown report kind '" + std::string(name) +
                                               "'; expected ranks, trajectories, neighbors, diversity, aoc, "
                                               "homophily, communities or stats");
}

std::string_view report_kind_name(ReportKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

ReportFormat parse_report_format(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kFormatNames); ++i)
    if (kFormatNames[i] == name) return static_cast<ReportFormat>(i);
  throw Error(ErrorKind::invalid_argument, "unknown report format '" + std::string(name) + "'; expected csv, json or svg");
}

std::string_view report_format_name(ReportFormat format) { return kFormatNames[static_cast<std::size_t>(format)]; }

std::vector<ReportFormat> supported_formats(ReportKind kind) {
  switch (kind) {
    case ReportKind::ranks:
    case ReportKind::trajectories:
    case ReportKind::diversity:
    case ReportKind::aoc:
      return {ReportFormat::csv, ReportFormat::json, ReportFormat::svg};
    default:
      return {ReportFormat::csv, ReportFormat::json};
  }
}

fs::path emit_report(const fs::path& output_dir, ReportKind kind, ReportFormat format) {
  const auto supported = supported_formats(kind);
  if (std::find(supported.begin(), supported.end(), format) == supported.end()) {
    std::string list;
    for (auto f : supported) list += (list.empty() ? "" : ", ") + std::string(report_format_name(f));
    throw Error(ErrorKind::invalid_argument, std::string(report_format_name(format)) + " is not supported for " +
                                                 std::string(report_kind_name(kind)) + "; supported formats: " + list);
  }
  const std::string name(report_kind_name(kind));
  const auto json_path = output_dir / "analysis" / (name + ".json");
  const auto target = output_dir / "reports" / (name + "." + std::string(report_format_name(format)));
  std::string content;
  switch (format) {
    case ReportFormat::json:
      read_artifact(json_path, kind);
      content = read_text_file(json_path);
      break;
    case ReportFormat::csv: {
      const auto csv_path = output_dir / "analysis" / (name + ".csv");
      read_artifact(json_path, kind);
      content = read_text_file(csv_path);
      break;
    }
    case ReportFormat::svg: {
      const auto j = read_artifact(json_path, kind);
      if (kind == ReportKind::ranks) content = ranks_svg(j);
      if (kind == ReportKind::trajectories) content = trajectories_svg(j);
      if (kind == ReportKind::aoc) content = aoc_svg(j);
      if (kind == ReportKind::diversity) content = diversity_svg(j);
      break;
    }
  }
  write_file_atomic(target, content);
  return target;
}

std::string svg_line_plot(std::string_view title, std::string_view x_label, std::string_view y_label,
                          std::span<const std::string> x_ticks, std::span<const SvgSeries> series, bool invert_y) {
  Frame f = fit(series);
  f.invert_y = invert_y;
  if (!x_ticks.empty()) {
    f.x0 = 0;
    f.x1 = static_cast<double>(x_ticks.size() - 1);
  }
  std::string out = svg_open(title) + axes(f);
  for (std::size_t i = 0; i < x_ticks.size(); ++i)
    out += "<text x=\"" + num(f.px(static_cast<double>(i))) + "\" y=\"" + num(kHeight - kBottom + 16) +
           "\" text-anchor=\"middle\">" + xml_escape(x_ticks[i]) + "</text>\n";
  out += "<text x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\">" + xml_escape(x_label) + "</text>\n";
  out += "<text x=\"14\" y=\"" + num(kHeight / 2) + "\" transform=\"rotate(-90 14 " + num(kHeight / 2) +
         ")\" text-anchor=\"middle\">" + xml_escape(y_label) + "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto* color = kPalette[i % std::size(kPalette)];
    std::string d;
    for (const auto& [x, y] : series[i].points) d += (d.empty() ? "M" : " L") + num(f.px(x)) + " " + num(f.py(y));
    if (!d.empty()) out += "<path d=\"" + d + "\" stroke=\"" + color + "\" fill=\"none\" stroke-width=\"2\"/>\n";
    for (const auto& [x, y] : series[i].points)
      out += "<circle cx=\"" + num(f.px(x)) + "\" cy=\"" + num(f.py(y)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
  }
  return out + legend(series) + "</svg>\n";
}

std::string svg_scatter_plot(std::string_view title, std::span<const SvgSeries> series) {
  const Frame f = fit(series);
  std::string out = svg_open(title) + axes(f);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto* color = kPalette[i % std::size(kPalette)];
    std::string d;
    for (const auto& [x, y] : series[i].points) d += (d.empty() ? "M" : " L") + num(f.px(x)) + " " + num(f.py(y));
    if (!d.empty())
      out += "<path d=\"" + d + "\" stroke=\"" + color + "\" fill=\"none\" stroke-opacity=\"0.5\"/>\n";
    for (const auto& [x, y] : series[i].points)
      out += "<circle cx=\"" + num(f.px(x)) + "\" cy=\"" + num(f.py(y)) + "\" r=\"4\" fill=\"" + color + "\"/>\n";
  }
  return out + legend(series) + "</svg>\n";
}

std::string svg_histogram(std::string_view title, std::span<const HistogramBin> bins) {
  Frame f{0, 1, 0, 1};
  if (!bins.empty()) {
    f.x0 = bins.front().start;
    f.x1 = bins.back().end;
    std::size_t top = 0;
    for (const auto& b : bins) top = std::max(top, b.count);
    f.y1 = std::max<double>(1.0, static_cast<double>(top));
  }
  std::string out = svg_open(title) + axes(f);
  for (const auto& b : bins) {
    const double x = f.px(b.start), w = f.px(b.end) - x, y = f.py(static_cast<double>(b.count));
    out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(std::max(0.0, w - 1)) + "\" height=\"" +
           num(f.py(0) - y) + "\" fill=\"#4c72b0\"><title>[" + format_real(b.start) + ", " + format_real(b.end) +
           "): " + std::to_string(b.count) + "</title></rect>\n";
  }
  if (!bins.empty())
    out += "<text x=\"" + num(f.px(f.x0)) + "\" y=\"" + num(kHeight - kBottom + 16) + "\" text-anchor=\"middle\">" +
           format_real(f.x0) + "</text>\n<text x=\"" + num(f.px(f.x1)) + "\" y=\"" + num(kHeight - kBottom + 16) +
           "\" text-anchor=\"middle\">" + format_real(f.x1) + "</text>\n";
  return out + "</svg>\n";
}

}  // namespace scitrace
