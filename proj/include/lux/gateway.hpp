// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstring>
#include <sstream>
#include <string>
#include <thread>

#include "lux/dali.hpp"

namespace lux::dali {

// Master-controller line protocol over the bus:
//   DAPC <short|G<n>|BCAST> <level>   -> OK
//   OFF <short|G<n>|BCAST>            -> OK
//   QUERY <short>                     -> LEVEL <n>
// Errors come back as `ERR <message>`.
class Gateway {
 public:
  explicit Gateway(Bus& bus) : bus_(bus) {}

  std::string handle_line(const std::string& line) {
    std::istringstream in(line);
    std::string verb;
    if (!(in >> verb)) return "ERR empty command";
    try {
      if (verb == "DAPC") {
        std::string addr_str;
        int level;
        if (!(in >> addr_str >> level)) return "ERR usage: DAPC <addr> <level>";
        if (level < 0 || level > 254) return "ERR level out of range 0..254";
        bus_.transact(encode_frame(parse_address(addr_str), Payload::dapc(level)));
        return "OK";
      }
      if (verb == "OFF") {
        std::string addr_str;
        if (!(in >> addr_str)) return "ERR usage: OFF <addr>";
        bus_.transact(encode_frame(parse_address(addr_str), Payload::command(kCmdOff)));
        return "OK";
      }
      if (verb == "QUERY") {
        int short_addr;
        if (!(in >> short_addr)) return "ERR usage: QUERY <short>";
        auto reply = bus_.transact(encode_frame(Address::short_address(short_addr),
                                                Payload::command(kCmdQueryActualLevel)));
        if (!reply) return "ERR no response";
        return "LEVEL " + std::to_string(static_cast<int>(*reply));
      }
    } catch (const std::exception& e) {
      return std::string("ERR ") + e.what();
    }
    return "ERR unknown command " + verb;
  }

  Bus& bus() { return bus_; }

 private:
  static Address parse_address(const std::string& s) {
    if (s == "BCAST") return Address::broadcast();
    if (!s.empty() && s[0] == 'G') return Address::group(std::stoi(s.substr(1)));
    return Address::short_address(std::stoi(s));
  }

  Bus& bus_;
};

// Single-connection TCP server wrapping a Gateway; commands are processed
// strictly in arrival order, matching the bus serialization contract.
class GatewayServer {
 public:
  explicit GatewayServer(Bus& bus) : gateway_(bus) {}
  ~GatewayServer() { stop(); }

  // Binds 127.0.0.1 and returns the bound port (0 picks an ephemeral port).
  int start(int port = 0) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw IoError("gateway: socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
      ::close(listen_fd_);
      throw IoError("gateway: bind() failed");
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    if (::listen(listen_fd_, 4) < 0) {
      ::close(listen_fd_);
      throw IoError("gateway: listen() failed");
    }
    running_ = true;
    thread_ = std::thread([this]() { serve(); });
    return port_;
  }

  int port() const { return port_; }

  void stop() {
    if (!running_.exchange(false)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    const int client = client_fd_.exchange(-1);
    if (client >= 0) {
      ::shutdown(client, SHUT_RDWR);
      ::close(client);
    }
    ::close(listen_fd_);
    if (thread_.joinable()) thread_.join();
  }

 private:
  void serve() {
    while (running_) {
      const int client = ::accept(listen_fd_, nullptr, nullptr);
      if (client < 0) break;
      client_fd_ = client;
      std::string pending;
      char buf[512];
      while (running_) {
        const ssize_t got = ::recv(client, buf, sizeof buf, 0);
        if (got <= 0) break;
        pending.append(buf, static_cast<size_t>(got));
        size_t nl;
        while ((nl = pending.find('\n')) != std::string::npos) {
          std::string line = pending.substr(0, nl);
          pending.erase(0, nl + 1);
          if (!line.empty() && line.back() == '\r') line.pop_back();
          const std::string reply = gateway_.handle_line(line) + "\n";
          ::send(client, reply.data(), reply.size(), 0);
        }
      }
      const int mine = client_fd_.exchange(-1);
      if (mine >= 0) ::close(mine);
    }
  }

  Gateway gateway_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> running_{false};
  std::atomic<int> client_fd_{-1};
  std::thread thread_;
};

class GatewayClient {
 public:
  GatewayClient(const std::string& host, int port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw IoError("gateway client: socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
      throw IoError("gateway client: bad host " + host);
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
      ::close(fd_);
      throw IoError("gateway client: cannot connect to " + host + ":" + std::to_string(port));
    }
  }

  ~GatewayClient() {
    if (fd_ >= 0) ::close(fd_);
  }

  GatewayClient(const GatewayClient&) = delete;
  GatewayClient& operator=(const GatewayClient&) = delete;

  std::string request(const std::string& line) {
    const std::string out = line + "\n";
    if (::send(fd_, out.data(), out.size(), 0) < 0)
      throw IoError("gateway client: send failed");
    std::string reply;
    char c;
    while (true) {
      const ssize_t got = ::recv(fd_, &c, 1, 0);
      if (got <= 0) throw IoError("gateway client: connection closed");
      if (c == '\n') break;
      reply.push_back(c);
    }
    return reply;
  }

 private:
  int fd_ = -1;
};

}  // namespace lux::dali
