#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include <sys/types.h>

namespace timexplain::io {

/// Bidirectional newline-framed text channel.
class LineChannel {
 public:
  virtual ~LineChannel() = default;

  /// Writes `line` followed by '\n'. Throws ProcessExit if the peer is gone.
  virtual void send_line(std::string_view line) = 0;
  /// Reads one line without its terminator. Throws Timeout if nothing
  /// complete arrives in time, ProcessExit on end of stream.
  virtual std::string receive_line(std::chrono::milliseconds timeout) = 0;
};

/// Buffered reader/writer over a pair of file descriptors.
class FdLineChannel : public LineChannel {
 public:
  FdLineChannel(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}
  ~FdLineChannel() override;
  FdLineChannel(const FdLineChannel&) = delete;
  FdLineChannel& operator=(const FdLineChannel&) = delete;

  void send_line(std::string_view line) override;
  std::string receive_line(std::chrono::milliseconds timeout) override;

 protected:
  void close_fds() noexcept;

 private:
  int read_fd_;
  int write_fd_;
  std::string buffer_;
};

/// Child process started through `/bin/sh -c command`, speaking over its
/// standard input and output. Standard error is inherited.
class ProcessChannel final : public FdLineChannel {
 public:
  explicit ProcessChannel(const std::string& command) : ProcessChannel(spawn(command)) {}
  ~ProcessChannel() override;

  pid_t pid() const noexcept { return pid_; }

 private:
  struct Spawned {
    int read_fd;
    int write_fd;
    pid_t pid;
  };
  explicit ProcessChannel(Spawned child)
      : FdLineChannel(child.read_fd, child.write_fd), pid_(child.pid) {}
  static Spawned spawn(const std::string& command);

  pid_t pid_;
};

/// TCP client connection to host:port.
class TcpChannel final : public FdLineChannel {
 public:
  TcpChannel(const std::string& host, std::uint16_t port) : TcpChannel(connect_to(host, port)) {}

 private:
  explicit TcpChannel(int fd) : FdLineChannel(fd, fd) {}
  static int connect_to(const std::string& host, std::uint16_t port);
};

}  // namespace timexplain::io
