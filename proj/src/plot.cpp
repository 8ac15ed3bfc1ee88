#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "stylo/csv.hpp"
#include "stylo/error.hpp"
#include "stylo/io.hpp"
#include "stylo/mds.hpp"

namespace stylo {

namespace {

constexpr double kWidth = 640, kHeight = 520;
constexpr double kLeft = 60, kRight = 170, kTop = 40, kBottom = 50;

constexpr std::array<const char*, 8> kColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                             "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string xml_escape(std::string_view s) {
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

// Marker shapes cycle: circle, square, triangle, diamond, cross.
std::string marker(std::size_t style, double x, double y) {
  const char* color = kColors[style % kColors.size()];
  constexpr double r = 4.5;
  switch (style % 5) {
    case 0:
      return fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{}\" fill=\"none\" stroke=\"{}\"/>",
                         x, y, r, color);
    case 1:
      return fmt::format(
          "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"{}\"/>",
          x - r, y - r, 2 * r, 2 * r, color);
    case 2:
      return fmt::format(
          "<polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" fill=\"none\" stroke=\"{}\"/>",
          x, y - r, x - r, y + r, x + r, y + r, color);
    case 3:
      return fmt::format(
          "<polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" fill=\"none\" "
          "stroke=\"{}\"/>",
          x, y - r, x + r, y, x, y + r, x - r, y, color);
    default:
      return fmt::format(
          "<path d=\"M{:.2f},{:.2f}L{:.2f},{:.2f}M{:.2f},{:.2f}L{:.2f},{:.2f}\" stroke=\"{}\"/>",
          x - r, y - r, x + r, y + r, x - r, y + r, x + r, y - r, color);
  }
}

}  // namespace

std::filesystem::path emit_scatter(const Embedding& e, std::span<const std::string> labels,
                                   const std::filesystem::path& svg_path,
                                   const ScatterOptions& options) {
  if (e.k < 2) throw InvalidArgument("scatter needs an embedding with at least 2 dimensions");
  if (options.x_axis >= e.k || options.y_axis >= e.k) throw InvalidArgument("axis out of range");
  std::vector<std::string> point_labels(labels.begin(), labels.end());
  if (point_labels.empty()) point_labels = e.labels;
  if (point_labels.size() != e.n) throw InvalidArgument("one label per embedded point required");

  std::map<std::string, std::size_t> style;
  for (const auto& l : point_labels) style.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [l, s] : style) s = next++;

  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (std::size_t i = 0; i < e.n; ++i) {
    const double x = e.at(i, options.x_axis), y = e.at(i, options.y_axis);
    xmin = std::min(xmin, x), xmax = std::max(xmax, x);
    ymin = std::min(ymin, y), ymax = std::max(ymax, y);
  }
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  // One scale for both axes keeps distances undistorted.
  double span = std::max(xmax - xmin, ymax - ymin);
  if (span <= 0) span = 1;
  span *= 1.1;
  const double scale = std::min(plot_w, plot_h) / span;
  const double cx = (xmin + xmax) / 2, cy = (ymin + ymax) / 2;
  auto px = [&](double x) { return kLeft + plot_w / 2 + (x - cx) * scale; };
  auto py = [&](double y) { return kTop + plot_h / 2 - (y - cy) * scale; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << fmt::format(
             "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
             "viewBox=\"0 0 {} {}\">\n",
             kWidth, kHeight, kWidth, kHeight)
      << fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth,
                     kHeight);
  if (!options.title.empty()) {
    svg << fmt::format(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" "
        "text-anchor=\"middle\">{}</text>\n",
        kLeft + plot_w / 2, xml_escape(options.title));
  }
  svg << fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n", kLeft,
      kTop, plot_w, plot_h);
  svg << "<g stroke=\"#bbb\" stroke-dasharray=\"4,3\">\n";
  if (px(0) > kLeft && px(0) < kLeft + plot_w) {
    svg << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\"/>\n", px(0), kTop,
                       kTop + plot_h);
  }
  if (py(0) > kTop && py(0) < kTop + plot_h) {
    svg << fmt::format("<line x1=\"{1}\" y1=\"{0:.2f}\" x2=\"{2}\" y2=\"{0:.2f}\"/>\n", py(0), kLeft,
                       kLeft + plot_w);
  }
  svg << "</g>\n";
  svg << fmt::format(
      "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" "
      "text-anchor=\"middle\">Dimension {}</text>\n",
      kLeft + plot_w / 2, kHeight - 15, options.x_axis + 1);
  svg << fmt::format(
      "<text x=\"18\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 {0})\">Dimension {1}</text>\n",
      kTop + plot_h / 2, options.y_axis + 1);

  svg << "<g id=\"points\">\n";
  for (std::size_t i = 0; i < e.n; ++i) {
    svg << marker(style[point_labels[i]], px(e.at(i, options.x_axis)), py(e.at(i, options.y_axis)))
        << '\n';
  }
  svg << "</g>\n<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  double ly = kTop + 12;
  for (const auto& [label, s] : style) {
    const double lx = kWidth - kRight + 20;
    svg << marker(s, lx, ly) << '\n'
        << fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", lx + 12, ly + 4, xml_escape(label));
    ly += 20;
  }
  svg << "</g>\n</svg>\n";

  std::ostringstream points;
  csv::write_row(points, {"doc_id", "label", "x", "y"});
  for (std::size_t i = 0; i < e.n; ++i) {
    const std::string id = i < e.doc_ids.size() ? e.doc_ids[i] : std::to_string(i);
    csv::write_row(points, {id, point_labels[i], csv::format_double(e.at(i, options.x_axis)),
                            csv::format_double(e.at(i, options.y_axis))});
  }

  auto csv_path = svg_path;
  csv_path.replace_extension(".csv");
  io::write_file(svg_path, svg.str());
  io::write_file(csv_path, points.str());
  return csv_path;
}

}  // namespace stylo
