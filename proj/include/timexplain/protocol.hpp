#pragma once

// Line-delimited JSON wire protocol for external models.
//
//   handshake (peer -> client): {"classes": ["<label>", ...]}
//   request   (client -> peer): {"id": <int>, "series": [[<float>, ...], ...]}
//   response  (peer -> client): {"id": <int>, "probs": [[<float>, ...], ...]}
//
// One message per line; unknown fields are ignored.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "timexplain/core.hpp"
#include "timexplain/models.hpp"

namespace timexplain::protocol {

struct Request {
  std::uint64_t id;
  std::vector<std::vector<double>> series;
};

struct Response {
  std::uint64_t id;
  std::vector<std::vector<double>> probs;
};

std::string encode_handshake(std::span<const ClassId> classes);
std::vector<ClassId> decode_handshake(std::string_view line);

std::string encode_request(std::uint64_t id, std::span<const TimeSeries> batch);
Request decode_request(std::string_view line);

std::string encode_response(std::uint64_t id, const models::ProbabilityMatrix& probs);
Response decode_response(std::string_view line);

}  // namespace timexplain::protocol
