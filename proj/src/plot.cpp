#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

#include "timexplain/io.hpp"

namespace timexplain::io {

namespace {

constexpr double kWidth = 800.0;
constexpr double kSeriesHeight = 200.0;
constexpr double kStripTop = 210.0;
constexpr double kStripHeight = 30.0;

std::string fixed(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 3);
  return std::string(buf, end);
}

// Fragment of sample t for time slices, of bin t for frequency bands.
std::optional<std::size_t> fragment_at(const MappingDescriptor& mapping, std::size_t t) {
  const auto& edges = mapping.edges;
  if (edges.size() < 2) return std::nullopt;
  if (t < edges.front() || t >= edges.back()) return std::nullopt;
  const auto it = std::upper_bound(edges.begin(), edges.end(), t);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

std::string heat_colour(double phi, double max_abs) {
  const double a = max_abs > 0.0 ? std::min(1.0, std::abs(phi) / max_abs) : 0.0;
  const int fade = static_cast<int>(std::lround(255.0 * (1.0 - a)));
  if (phi > 0.0) return "rgb(255," + std::to_string(fade) + "," + std::to_string(fade) + ")";
  if (phi < 0.0) return "rgb(" + std::to_string(fade) + "," + std::to_string(fade) + ",255)";
  return "rgb(255,255,255)";
}

}  // namespace

std::string plot_csv(const ExplanationDocument& doc, const TimeSeries& specimen) {
  const auto& impact = doc.explained();
  std::string csv = "t,x,fragment,impact\n";
  for (std::size_t t = 0; t < specimen.size(); ++t) {
    csv += std::to_string(t) + "," + to_text(specimen[t]) + ",";
    if (const auto k = fragment_at(doc.mapping, t); k && *k < impact.fragment_count()) {
      csv += std::to_string(*k) + "," + to_text(impact.phi(*k));
    } else {
      csv += ",";
    }
    csv += "\n";
  }
  return csv;
}

std::string plot_svg(const ExplanationDocument& doc, const TimeSeries& specimen) {
  const auto& impact = doc.explained();
  const std::size_t d = specimen.size();
  const auto [lo_it, hi_it] = std::minmax_element(specimen.begin(), specimen.end());
  const double lo = *lo_it;
  const double span = *hi_it > lo ? *hi_it - lo : 1.0;

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth) +
                    "\" height=\"" + fixed(kStripTop + kStripHeight + 10.0) + "\">\n";
  svg += "<polyline class=\"series\" fill=\"none\" stroke=\"black\" points=\"";
  for (std::size_t t = 0; t < d; ++t) {
    const double px = kWidth * static_cast<double>(t) / static_cast<double>(d - 1);
    const double py = 5.0 + (kSeriesHeight - 10.0) * (1.0 - (specimen[t] - lo) / span);
    if (t > 0) svg += " ";
    svg += fixed(px) + "," + fixed(py);
  }
  svg += "\"/>\n";

  double max_abs = 0.0;
  for (double v : impact.phi()) max_abs = std::max(max_abs, std::abs(v));

  // The strip axis is time for slices, frequency bins for bands, and two
  // equal halves for the statistics mapping.
  std::vector<double> bounds;
  double axis = 0.0;
  if (doc.mapping.edges.size() == impact.fragment_count() + 1) {
    const auto first = static_cast<double>(doc.mapping.edges.front());
    axis = static_cast<double>(doc.mapping.edges.back()) - first;
    for (auto e : doc.mapping.edges) bounds.push_back(static_cast<double>(e) - first);
  } else {
    axis = static_cast<double>(impact.fragment_count());
    for (std::size_t k = 0; k <= impact.fragment_count(); ++k) bounds.push_back(static_cast<double>(k));
  }
  for (std::size_t k = 0; k < impact.fragment_count(); ++k) {
    const double x0 = kWidth * bounds[k] / axis;
    const double x1 = kWidth * bounds[k + 1] / axis;
    svg += "<rect class=\"impact\" data-fragment=\"" + std::to_string(k) + "\" x=\"" + fixed(x0) +
           "\" y=\"" + fixed(kStripTop) + "\" width=\"" + fixed(x1 - x0) + "\" height=\"" +
           fixed(kStripHeight) + "\" fill=\"" + heat_colour(impact.phi(k), max_abs) + "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

PlotFiles emit_plot_data(const ExplanationDocument& doc, const TimeSeries& specimen,
                         const std::filesystem::path& base) {
  PlotFiles files{base, base};
  files.csv += ".csv";
  files.svg += ".svg";
  write_text(files.csv, plot_csv(doc, specimen));
  write_text(files.svg, plot_svg(doc, specimen));
  return files;
}

}  // namespace timexplain::io
