#include "timexplain/external_model.hpp"

#include <charconv>

#include "timexplain/protocol.hpp"

namespace timexplain::models {

ExternalModel::ExternalModel(std::unique_ptr<io::LineChannel> channel,
                             std::chrono::milliseconds timeout)
    : channel_(std::move(channel)), timeout_(timeout) {
  classes_ = protocol::decode_handshake(channel_->receive_line(timeout_));
}

ProbabilityMatrix ExternalModel::predict(std::span<const TimeSeries> batch) const {
  protocol::Response response;
  std::uint64_t id = 0;
  {
    const std::lock_guard lock(mutex_);
    id = next_id_++;
    channel_->send_line(protocol::encode_request(id, batch));
    response = protocol::decode_response(channel_->receive_line(timeout_));
  }
  if (response.id != id) {
    throw Error(ErrorKind::ProtocolViolation, "response id " + std::to_string(response.id) +
                                                  " does not echo request id " + std::to_string(id));
  }
  if (response.probs.size() != batch.size()) {
    throw Error(ErrorKind::ProtocolViolation,
                "response has " + std::to_string(response.probs.size()) + " rows for a batch of " +
                    std::to_string(batch.size()));
  }
  ProbabilityMatrix out(batch.size(), classes_.size());
  for (std::size_t r = 0; r < response.probs.size(); ++r) {
    if (response.probs[r].size() != classes_.size()) {
      throw Error(ErrorKind::ProtocolViolation,
                  "response row " + std::to_string(r) + " has " +
                      std::to_string(response.probs[r].size()) + " entries for " +
                      std::to_string(classes_.size()) + " classes");
    }
    for (std::size_t c = 0; c < classes_.size(); ++c) out(r, c) = response.probs[r][c];
  }
  if (auto problem = describe_probability_violation(out); !problem.empty()) {
    throw Error(ErrorKind::ProtocolViolation, "invalid probabilities: " + problem);
  }
  return out;
}

std::unique_ptr<ExternalModel> launch_external_model(const std::string& command,
                                                     std::chrono::milliseconds timeout) {
  return std::make_unique<ExternalModel>(std::make_unique<io::ProcessChannel>(command), timeout);
}

std::unique_ptr<ExternalModel> connect_external_model(std::string_view address,
                                                      std::chrono::milliseconds timeout) {
  if (address.starts_with("tcp://")) address.remove_prefix(6);
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorKind::InvalidArgument, "model address must look like host:port");
  }
  const auto port_text = address.substr(colon + 1);
  std::uint16_t port = 0;
  const auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || end != port_text.data() + port_text.size() || port == 0) {
    throw Error(ErrorKind::InvalidArgument, "invalid port in model address");
  }
  std::string host(address.substr(0, colon));
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  return std::make_unique<ExternalModel>(std::make_unique<io::TcpChannel>(host, port), timeout);
}

}  // namespace timexplain::models
