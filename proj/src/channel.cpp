#include "timexplain/channel.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "timexplain/error.hpp"

namespace timexplain::io {

FdLineChannel::~FdLineChannel() { close_fds(); }

void FdLineChannel::close_fds() noexcept {
  if (read_fd_ >= 0) ::close(read_fd_);
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  read_fd_ = -1;
  write_fd_ = -1;
}

void FdLineChannel::send_line(std::string_view line) {
  std::string framed(line);
  framed.push_back('\n');
  std::size_t sent = 0;
  while (sent < framed.size()) {
    const ssize_t n = ::send(write_fd_, framed.data() + sent, framed.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) {
      const ssize_t w = ::write(write_fd_, framed.data() + sent, framed.size() - sent);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorKind::ProcessExit, std::string("model peer closed: ") + std::strerror(errno));
      }
      sent += static_cast<std::size_t>(w);
      continue;
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::ProcessExit, std::string("model peer closed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::string FdLineChannel::receive_line(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      throw Error(ErrorKind::Timeout, "model peer did not answer within " +
                                          std::to_string(timeout.count()) + " ms");
    }
    pollfd pfd{read_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::IoError, std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[65536];
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::ProcessExit, std::string("model peer read failed: ") + std::strerror(errno));
    }
    if (n == 0) throw Error(ErrorKind::ProcessExit, "model peer closed the connection");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

ProcessChannel::Spawned ProcessChannel::spawn(const std::string& command) {
  // A peer that dies mid-request must surface as EPIPE, not kill us.
  std::signal(SIGPIPE, SIG_IGN);
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0) {
    throw Error(ErrorKind::IoError, std::string("pipe failed: ") + std::strerror(errno));
  }
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw Error(ErrorKind::IoError, std::string("pipe failed: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    throw Error(ErrorKind::IoError, std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    // Own process group, so teardown also reaches whatever the shell spawned.
    ::setpgid(0, 0);
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(to_child[0]);
  ::close(from_child[1]);
  return {from_child[0], to_child[1], pid};
}

ProcessChannel::~ProcessChannel() {
  // Closing stdin asks a well-behaved peer to exit; give it a moment first.
  close_fds();
  for (int i = 0; i < 50; ++i) {
    if (::waitpid(pid_, nullptr, WNOHANG) != 0) {
      ::kill(-pid_, SIGTERM);
      return;
    }
    ::usleep(10000);
  }
  ::kill(-pid_, SIGTERM);
  ::waitpid(pid_, nullptr, 0);
}

int TcpChannel::connect_to(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0) {
    throw Error(ErrorKind::IoError, "cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (auto* ai = found; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) {
    throw Error(ErrorKind::ProcessExit, "cannot connect to " + host + ":" + service);
  }
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return fd;
}

}  // namespace timexplain::io
