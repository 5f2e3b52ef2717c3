#include "timexplain/protocol.hpp"

#include <json.hpp>

namespace timexplain::protocol {

using nlohmann::json;

namespace {

json parse_line(std::string_view line, std::string_view what) {
  json doc = json::parse(line.begin(), line.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorKind::ProtocolViolation, std::string(what) + " is not a JSON object");
  }
  return doc;
}

std::vector<std::vector<double>> number_rows(const json& doc, const char* field,
                                             std::string_view what) {
  const auto it = doc.find(field);
  if (it == doc.end() || !it->is_array()) {
    throw Error(ErrorKind::ProtocolViolation,
                std::string(what) + " lacks a '" + field + "' array");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(it->size());
  for (const auto& row : *it) {
    if (!row.is_array()) {
      throw Error(ErrorKind::ProtocolViolation, std::string(what) + " rows must be arrays");
    }
    std::vector<double> values;
    values.reserve(row.size());
    for (const auto& v : row) {
      if (!v.is_number()) {
        throw Error(ErrorKind::ProtocolViolation, std::string(what) + " values must be numbers");
      }
      values.push_back(v.get<double>());
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

std::uint64_t message_id(const json& doc, std::string_view what) {
  const auto it = doc.find("id");
  if (it == doc.end() || !it->is_number_integer() ||
      (it->is_number_integer() && !it->is_number_unsigned() && it->get<std::int64_t>() < 0)) {
    throw Error(ErrorKind::ProtocolViolation,
                std::string(what) + " lacks a non-negative integer 'id'");
  }
  return it->get<std::uint64_t>();
}

}  // namespace

std::string encode_handshake(std::span<const ClassId> classes) {
  return json{{"classes", std::vector<ClassId>(classes.begin(), classes.end())}}.dump();
}

std::vector<ClassId> decode_handshake(std::string_view line) {
  const json doc = parse_line(line, "handshake");
  const auto it = doc.find("classes");
  if (it == doc.end() || !it->is_array() || it->empty()) {
    throw Error(ErrorKind::ProtocolViolation, "handshake lacks a non-empty 'classes' array");
  }
  std::vector<ClassId> classes;
  for (const auto& c : *it) {
    if (!c.is_string()) {
      throw Error(ErrorKind::ProtocolViolation, "handshake class labels must be strings");
    }
    classes.push_back(c.get<std::string>());
  }
  return classes;
}

std::string encode_request(std::uint64_t id, std::span<const TimeSeries> batch) {
  json series = json::array();
  for (const auto& s : batch) series.push_back(std::vector<double>(s.begin(), s.end()));
  return json{{"id", id}, {"series", std::move(series)}}.dump();
}

Request decode_request(std::string_view line) {
  const json doc = parse_line(line, "request");
  return {message_id(doc, "request"), number_rows(doc, "series", "request")};
}

std::string encode_response(std::uint64_t id, const models::ProbabilityMatrix& probs) {
  json rows = json::array();
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    rows.push_back(std::vector<double>(probs.row(r).begin(), probs.row(r).end()));
  }
  return json{{"id", id}, {"probs", std::move(rows)}}.dump();
}

Response decode_response(std::string_view line) {
  const json doc = parse_line(line, "response");
  return {message_id(doc, "response"), number_rows(doc, "probs", "response")};
}

}  // namespace timexplain::protocol
