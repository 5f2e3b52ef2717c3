#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "timexplain/channel.hpp"
#include "timexplain/models.hpp"

namespace timexplain::models {

/// Client for a model living in another process. Each predict() call is one
/// request/response exchange; exchanges on one connection are serialised.
/// Responses are checked against the probability-row invariants.
class ExternalModel final : public ProbabilisticModel {
 public:
  static constexpr std::chrono::milliseconds kDefaultTimeout{30000};

  /// Reads the handshake from `channel` before returning.
  explicit ExternalModel(std::unique_ptr<io::LineChannel> channel,
                         std::chrono::milliseconds timeout = kDefaultTimeout);

  const std::vector<ClassId>& classes() const override { return classes_; }
  ProbabilityMatrix predict(std::span<const TimeSeries> batch) const override;

 private:
  std::unique_ptr<io::LineChannel> channel_;
  std::chrono::milliseconds timeout_;
  std::vector<ClassId> classes_;
  mutable std::mutex mutex_;
  mutable std::uint64_t next_id_ = 0;
};

/// Launches `command` through the shell and speaks over its stdio.
std::unique_ptr<ExternalModel> launch_external_model(
    const std::string& command, std::chrono::milliseconds timeout = ExternalModel::kDefaultTimeout);

/// Connects to "host:port" (an optional "tcp://" prefix is accepted).
std::unique_ptr<ExternalModel> connect_external_model(
    std::string_view address, std::chrono::milliseconds timeout = ExternalModel::kDefaultTimeout);

}  // namespace timexplain::models
