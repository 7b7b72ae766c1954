#pragma once

#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sdx/net/transport.h"

namespace sdx::net {

class NetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TcpConnection : public Transport, public std::enable_shared_from_this<TcpConnection> {
 public:
  TcpConnection(int fd, std::string peer);
  ~TcpConnection() override;

  bool send(std::vector<uint8_t> bytes) override;
  void close() override;
  bool closed() const override { return closed_; }
  std::string describe() const override { return "tcp:" + peer_; }

  // Spawns the reader thread feeding sink until EOF or close().
  void start(std::shared_ptr<ByteSink> sink);
  // Blocks until the reader thread has exited.
  void join();

 private:
  void read_loop(std::shared_ptr<ByteSink> sink);

  int fd_;
  std::string peer_;
  std::mutex send_mu_;
  std::atomic<bool> closed_{false};
  std::thread reader_;
};

// Connects to host:port; throws NetError on failure.
std::shared_ptr<TcpConnection> tcp_connect(const std::string& host, int port);

class TcpServer {
 public:
  using AcceptFn = std::function<void(std::shared_ptr<TcpConnection>)>;

  TcpServer() = default;
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  // Binds and starts accepting; throws NetError when the port is taken. Port
  // 0 picks a free port, see port().
  void listen(const std::string& host, int port, AcceptFn on_accept);
  void stop();
  int port() const { return port_; }
  bool listening() const { return listening_; }

 private:
  void accept_loop();

  int fd_ = -1;
  int port_ = 0;
  std::atomic<bool> listening_{false};
  AcceptFn on_accept_;
  std::thread thread_;
  std::mutex mu_;
  std::vector<std::weak_ptr<TcpConnection>> connections_;
};

}  // namespace sdx::net
