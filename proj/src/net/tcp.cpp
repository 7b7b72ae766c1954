#include "sdx/net/tcp.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace sdx::net {

namespace {

std::string errno_text() { return std::strerror(errno); }

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

std::string peer_name(const sockaddr_in& addr) {
  char buf[INET_ADDRSTRLEN] = {};
  ::inet_ntop(AF_INET, &addr.sin_addr, buf, sizeof(buf));
  return std::string(buf) + ":" + std::to_string(ntohs(addr.sin_port));
}

}  // namespace

TcpConnection::TcpConnection(int fd, std::string peer) : fd_(fd), peer_(std::move(peer)) {
  set_nodelay(fd_);
}

TcpConnection::~TcpConnection() {
  close();
  if (reader_.joinable()) {
    if (reader_.get_id() == std::this_thread::get_id()) {
      reader_.detach();
    } else {
      reader_.join();
    }
  }
  ::close(fd_);
}

bool TcpConnection::send(std::vector<uint8_t> bytes) {
  std::lock_guard lock(send_mu_);
  if (closed_) return false;
  size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      closed_ = true;
      ::shutdown(fd_, SHUT_RDWR);
      return false;
    }
    off += static_cast<size_t>(n);
  }
  return true;
}

void TcpConnection::close() {
  if (closed_.exchange(true)) return;
  ::shutdown(fd_, SHUT_RDWR);
}

void TcpConnection::start(std::shared_ptr<ByteSink> sink) {
  reader_ = std::thread([this, sink = std::move(sink)] { read_loop(sink); });
}

void TcpConnection::join() {
  if (reader_.joinable() && reader_.get_id() != std::this_thread::get_id()) reader_.join();
}

void TcpConnection::read_loop(std::shared_ptr<ByteSink> sink) {
  std::vector<uint8_t> buf(64 * 1024);
  while (true) {
    const ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    sink->on_bytes(std::span<const uint8_t>(buf.data(), static_cast<size_t>(n)));
  }
  closed_ = true;
  sink->on_close();
}

std::shared_ptr<TcpConnection> tcp_connect(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw NetError("resolve " + host + ": " + ::gai_strerror(rc));
  }
  int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw NetError("socket: " + errno_text());
  }
  if (::connect(fd, res->ai_addr, res->ai_addrlen) != 0) {
    const std::string err = errno_text();
    ::freeaddrinfo(res);
    ::close(fd);
    throw NetError("connect " + host + ":" + service + ": " + err);
  }
  ::freeaddrinfo(res);
  return std::make_shared<TcpConnection>(fd, host + ":" + service);
}

TcpServer::~TcpServer() { stop(); }

void TcpServer::listen(const std::string& host, int port, AcceptFn on_accept) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw NetError("socket: " + errno_text());
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    fd_ = -1;
    throw NetError("bad listen address " + host);
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(fd_, 64) != 0) {
    const std::string err = errno_text();
    ::close(fd_);
    fd_ = -1;
    throw NetError("bind " + host + ":" + std::to_string(port) + ": " + err);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  on_accept_ = std::move(on_accept);
  listening_ = true;
  thread_ = std::thread([this] { accept_loop(); });
}

void TcpServer::accept_loop() {
  while (listening_) {
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, 100);
    if (rc <= 0) continue;
    sockaddr_in peer{};
    socklen_t len = sizeof(peer);
    const int cfd = ::accept(fd_, reinterpret_cast<sockaddr*>(&peer), &len);
    if (cfd < 0) continue;
    auto conn = std::make_shared<TcpConnection>(cfd, peer_name(peer));
    {
      std::lock_guard lock(mu_);
      std::erase_if(connections_, [](const auto& w) { return w.expired(); });
      connections_.push_back(conn);
    }
    on_accept_(conn);
  }
}

void TcpServer::stop() {
  if (!listening_.exchange(false)) return;
  if (thread_.joinable()) thread_.join();
  ::close(fd_);
  fd_ = -1;
  std::vector<std::shared_ptr<TcpConnection>> live;
  {
    std::lock_guard lock(mu_);
    for (auto& w : connections_) {
      if (auto c = w.lock()) live.push_back(std::move(c));
    }
    connections_.clear();
  }
  for (auto& c : live) {
    c->close();
    c->join();
  }
}

}  // namespace sdx::net
