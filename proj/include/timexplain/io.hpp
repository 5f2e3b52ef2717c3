#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "timexplain/core.hpp"
#include "timexplain/mappings.hpp"

namespace timexplain::io {

/// Shortest decimal text that parses back to exactly `value`.
std::string to_text(double value);

/// UCR text layout: one series per line, label first, then the values.
/// The separator (tab or comma) is detected from the first non-blank line.
LabeledDataset parse_ucr(std::string_view text);
LabeledDataset read_ucr(const std::filesystem::path& path);
std::string format_ucr(const LabeledDataset& dataset, char separator = '\t');
void write_ucr(const LabeledDataset& dataset, const std::filesystem::path& path,
               char separator = '\t');

inline constexpr std::string_view kSchemaVersion = "1";

struct MappingDescriptor {
  mappings::MappingKind kind = mappings::MappingKind::TimeSlice;
  std::size_t fragments = 0;
  mappings::ReplacementKind replacement = mappings::ReplacementKind::Sample;
  /// Slice boundaries or band edges; empty for statistics.
  std::vector<std::size_t> edges;

  friend bool operator==(const MappingDescriptor&, const MappingDescriptor&) = default;
};

struct RunMetadata {
  std::size_t runs = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t model_queries = 0;
  bool environment_classes = false;
  bool exact = false;

  friend bool operator==(const RunMetadata&, const RunMetadata&) = default;
};

struct ExplanationDocument {
  std::string schema_version{kSchemaVersion};
  std::string dataset;
  std::string model;
  std::size_t specimen_index = 0;
  std::optional<ClassId> specimen_label;
  /// Class whose impacts represent the document in comparisons and plots.
  ClassId explained_class;
  MappingDescriptor mapping;
  std::map<ClassId, ImpactVector> impacts;
  std::optional<std::map<std::pair<ClassId, ClassId>, ImpactVector>> intermediates;
  RunMetadata run;

  /// Impacts of explained_class.
  const ImpactVector& explained() const;

  friend bool operator==(const ExplanationDocument&, const ExplanationDocument&) = default;
};

std::string serialize_explanation(const ExplanationDocument& doc);
ExplanationDocument parse_explanation(std::string_view text);
void write_explanation(const ExplanationDocument& doc, const std::filesystem::path& path);
ExplanationDocument read_explanation(const std::filesystem::path& path);

struct PlotFiles {
  std::filesystem::path csv;
  std::filesystem::path svg;
};

/// Writes `<base>.csv` with columns (t, x, fragment, impact) and `<base>.svg`
/// with the series line above a heat strip of the explained class's impacts:
/// red for positive, blue for negative, intensity |phi| / max |phi|.
PlotFiles emit_plot_data(const ExplanationDocument& doc, const TimeSeries& specimen,
                         const std::filesystem::path& base);

std::string plot_csv(const ExplanationDocument& doc, const TimeSeries& specimen);
std::string plot_svg(const ExplanationDocument& doc, const TimeSeries& specimen);

/// Writes `content` to `path`, throwing IoError on failure.
void write_text(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

}  // namespace timexplain::io
