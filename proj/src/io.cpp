#include "timexplain/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace timexplain::io {

using nlohmann::ordered_json;

std::string to_text(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || end != field.data() + field.size()) {
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line) + ": '" + std::string(field) + "' is not a number");
  }
  return value;
}

}  // namespace

LabeledDataset parse_ucr(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
  std::vector<ClassId> labels;
  char separator = 0;
  std::size_t line_no = 0;
  std::size_t length = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text.remove_prefix(newline == std::string_view::npos ? text.size() : newline + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    if (separator == 0) {
      if (line.find('\t') != std::string_view::npos) {
        separator = '\t';
      } else if (line.find(',') != std::string_view::npos) {
        separator = ',';
      } else {
        throw Error(ErrorKind::ParseError,
                    "line " + std::to_string(line_no) + ": no tab or comma separator");
      }
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      const auto pos = line.find(separator, start);
      fields.push_back(line.substr(start, pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    if (fields.size() < 2) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) +
                                             ": expected a label and at least one value");
    }
    const auto label = trim(fields.front());
    if (label.empty()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": empty label");
    }
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) values.push_back(parse_number(fields[i], line_no));
    if (rows.empty()) {
      length = values.size();
    } else if (values.size() != length) {
      throw Error(ErrorKind::NonUniformLength,
                  "line " + std::to_string(line_no) + ": series has " +
                      std::to_string(values.size()) + " values, expected " + std::to_string(length));
    }
    rows.push_back(std::move(values));
    row_lines.push_back(line_no);
    labels.emplace_back(label);
  }
  std::vector<TimeSeries> series;
  series.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      series.emplace_back(std::move(rows[i]));
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(row_lines[i]) + ": " + e.what());
    }
  }
  return LabeledDataset(std::move(series), std::move(labels));
}

LabeledDataset read_ucr(const std::filesystem::path& path) { return parse_ucr(read_text(path)); }

std::string format_ucr(const LabeledDataset& dataset, char separator) {
  if (separator != '\t' && separator != ',') {
    throw Error(ErrorKind::InvalidArgument, "separator must be tab or comma");
  }
  std::string out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out += dataset.label(i);
    for (double v : dataset[i]) {
      out += separator;
      out += to_text(v);
    }
    out += '\n';
  }
  return out;
}

void write_ucr(const LabeledDataset& dataset, const std::filesystem::path& path, char separator) {
  write_text(path, format_ucr(dataset, separator));
}

const ImpactVector& ExplanationDocument::explained() const {
  const auto it = impacts.find(explained_class);
  if (it == impacts.end()) {
    throw Error(ErrorKind::ParseError, "document has no impacts for class '" + explained_class + "'");
  }
  return it->second;
}

namespace {

ordered_json impact_json(const ImpactVector& v) {
  return ordered_json{{"phi", std::vector<double>(v.phi().begin(), v.phi().end())},
                      {"base_value", v.base_value()},
                      {"prediction", v.prediction()}};
}

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorKind::ParseError, "explanation document: " + what);
}

const ordered_json& field(const ordered_json& obj, const char* name) {
  if (!obj.is_object()) schema_error(std::string("expected an object around '") + name + "'");
  const auto it = obj.find(name);
  if (it == obj.end()) schema_error(std::string("missing '") + name + "'");
  return *it;
}

std::string string_field(const ordered_json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_string()) schema_error(std::string("'") + name + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const ordered_json& obj, const char* name) {
  const auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) schema_error(std::string("'") + name + "' must be a string or null");
  return it->get<std::string>();
}

std::uint64_t unsigned_field(const ordered_json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_number_unsigned()) {
    schema_error(std::string("'") + name + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool bool_field(const ordered_json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_boolean()) schema_error(std::string("'") + name + "' must be a boolean");
  return v.get<bool>();
}

double number_field(const ordered_json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_number()) schema_error(std::string("'") + name + "' must be a number");
  return v.get<double>();
}

ImpactVector parse_impact(const ordered_json& obj) {
  const auto& phi = field(obj, "phi");
  if (!phi.is_array() || phi.empty()) schema_error("'phi' must be a non-empty array");
  std::vector<double> values;
  for (const auto& v : phi) {
    if (!v.is_number()) schema_error("'phi' entries must be numbers");
    values.push_back(v.get<double>());
  }
  try {
    return ImpactVector(std::move(values), number_field(obj, "base_value"),
                        number_field(obj, "prediction"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    schema_error(e.what());
  }
}

}  // namespace

std::string serialize_explanation(const ExplanationDocument& doc) {
  ordered_json j;
  j["schema_version"] = doc.schema_version;
  j["dataset"] = doc.dataset;
  j["model"] = doc.model;
  j["specimen_index"] = doc.specimen_index;
  j["specimen_label"] = doc.specimen_label ? ordered_json(*doc.specimen_label) : ordered_json();
  j["explained_class"] = doc.explained_class;
  j["mapping"] = ordered_json{{"kind", std::string(to_string(doc.mapping.kind))},
                              {"fragments", doc.mapping.fragments},
                              {"replacement", std::string(to_string(doc.mapping.replacement))},
                              {"edges", doc.mapping.edges}};
  ordered_json impacts = ordered_json::object();
  for (const auto& [cls, v] : doc.impacts) impacts[cls] = impact_json(v);
  j["impacts"] = std::move(impacts);
  if (doc.intermediates) {
    ordered_json list = ordered_json::array();
    for (const auto& [key, v] : *doc.intermediates) {
      auto entry = ordered_json{{"class", key.first}, {"environment", key.second}};
      entry.update(impact_json(v));
      list.push_back(std::move(entry));
    }
    j["intermediates"] = std::move(list);
  }
  j["run"] = ordered_json{{"runs", doc.run.runs},
                          {"samples", doc.run.samples},
                          {"seed", doc.run.seed},
                          {"model_queries", doc.run.model_queries},
                          {"environment_classes", doc.run.environment_classes},
                          {"exact", doc.run.exact}};
  return j.dump(2) + "\n";
}

ExplanationDocument parse_explanation(std::string_view text) {
  const auto j = ordered_json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) schema_error("not valid JSON");
  if (!j.is_object()) schema_error("top level must be an object");

  ExplanationDocument doc;
  doc.schema_version = string_field(j, "schema_version");
  if (doc.schema_version != kSchemaVersion) {
    throw Error(ErrorKind::SchemaVersionMismatch,
                "explanation document version '" + doc.schema_version + "' is not supported (expected '" +
                    std::string(kSchemaVersion) + "')");
  }
  doc.dataset = string_field(j, "dataset");
  doc.model = string_field(j, "model");
  doc.specimen_index = unsigned_field(j, "specimen_index");
  doc.specimen_label = optional_string(j, "specimen_label");
  doc.explained_class = string_field(j, "explained_class");

  const auto& mapping = field(j, "mapping");
  try {
    doc.mapping.kind = mappings::parse_mapping_kind(string_field(mapping, "kind"));
    doc.mapping.replacement = mappings::parse_replacement_kind(string_field(mapping, "replacement"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    schema_error(e.what());
  }
  doc.mapping.fragments = unsigned_field(mapping, "fragments");
  const auto& edges = field(mapping, "edges");
  if (!edges.is_array()) schema_error("'edges' must be an array");
  for (const auto& e : edges) {
    if (!e.is_number_unsigned()) schema_error("'edges' entries must be non-negative integers");
    doc.mapping.edges.push_back(e.get<std::size_t>());
  }

  const auto& impacts = field(j, "impacts");
  if (!impacts.is_object() || impacts.empty()) schema_error("'impacts' must be a non-empty object");
  for (const auto& [cls, v] : impacts.items()) {
    auto impact = parse_impact(v);
    if (impact.fragment_count() != doc.mapping.fragments) {
      schema_error("impacts of class '" + cls + "' do not have " +
                   std::to_string(doc.mapping.fragments) + " fragments");
    }
    doc.impacts.emplace(cls, std::move(impact));
  }
  if (!doc.impacts.contains(doc.explained_class)) {
    schema_error("no impacts for explained class '" + doc.explained_class + "'");
  }

  if (const auto it = j.find("intermediates"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) schema_error("'intermediates' must be an array");
    doc.intermediates.emplace();
    for (const auto& entry : *it) {
      doc.intermediates->emplace(
          std::pair{string_field(entry, "class"), string_field(entry, "environment")},
          parse_impact(entry));
    }
  }

  const auto& run = field(j, "run");
  doc.run.runs = unsigned_field(run, "runs");
  doc.run.samples = unsigned_field(run, "samples");
  doc.run.seed = unsigned_field(run, "seed");
  doc.run.model_queries = unsigned_field(run, "model_queries");
  doc.run.environment_classes = bool_field(run, "environment_classes");
  doc.run.exact = bool_field(run, "exact");
  return doc;
}

void write_explanation(const ExplanationDocument& doc, const std::filesystem::path& path) {
  write_text(path, serialize_explanation(doc));
}

ExplanationDocument read_explanation(const std::filesystem::path& path) {
  return parse_explanation(read_text(path));
}

}  // namespace timexplain::io
