// Copyright 2026 The SIF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sif/endpoint.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <functional>
#include <map>
#include <thread>

#include "json.hpp"
#include "sif/error.hpp"

namespace sif {
namespace {

using Clock = std::chrono::steady_clock;

void set_nonblocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

[[noreturn]] void unavailable(const std::string& what) {
  throw Error(ErrorKind::kEndpointUnavailable, what);
}

}  // namespace

class EndpointClient::Channel {
 public:
  enum class Status { kDone, kTimeout, kClosed };

  ~Channel() {
    if (read_fd_ >= 0) close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) close(write_fd_);
    if (pid_ > 0) {
      // Workers exit on stdin EOF; give them a moment before killing.
      for (int i = 0; i < 50; ++i) {
        if (waitpid(pid_, nullptr, WNOHANG) != 0) return;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
  }

  static std::unique_ptr<Channel> spawn(const std::string& command) {
    // Writes to a dead worker must surface as errors, not kill the process.
    signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (pipe2(to_child, O_CLOEXEC) != 0) unavailable("pipe failed");
    if (pipe2(from_child, O_CLOEXEC) != 0) {
      close(to_child[0]);
      close(to_child[1]);
      unavailable("pipe failed");
    }
    const pid_t pid = fork();
    if (pid < 0) unavailable("fork failed");
    if (pid == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    auto channel = std::unique_ptr<Channel>(new Channel());
    channel->pid_ = pid;
    channel->write_fd_ = to_child[1];
    channel->read_fd_ = from_child[0];
    set_nonblocking(channel->write_fd_);
    set_nonblocking(channel->read_fd_);
    return channel;
  }

  static std::unique_ptr<Channel> connect_tcp(const std::string& host,
                                              std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    const std::string service = std::to_string(port);
    if (getaddrinfo(host.c_str(), service.c_str(), &hints, &result) != 0) {
      unavailable("cannot resolve " + host);
    }
    int fd = -1;
    for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
      fd = socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC,
                  ai->ai_protocol);
      if (fd < 0) continue;
      if (connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
      close(fd);
      fd = -1;
    }
    freeaddrinfo(result);
    if (fd < 0) unavailable("cannot connect to " + host + ":" + service);
    auto channel = std::unique_ptr<Channel>(new Channel());
    channel->socket_ = true;
    channel->read_fd_ = channel->write_fd_ = fd;
    set_nonblocking(fd);
    return channel;
  }

  // Sends `out` while feeding complete received lines to `on_line` until it
  // returns true. The timeout restarts whenever a line arrives.
  Status exchange(std::string out,
                  const std::function<bool(std::string_view)>& on_line,
                  int timeout_ms) {
    auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
    std::size_t sent = 0;
    bool finished = false;
    while (!finished || sent < out.size()) {
      pollfd fds[2];
      nfds_t n = 0;
      fds[n++] = {read_fd_, POLLIN, 0};
      const bool want_write = sent < out.size();
      if (want_write) {
        if (write_fd_ == read_fd_) {
          fds[0].events |= POLLOUT;
        } else {
          fds[n++] = {write_fd_, POLLOUT, 0};
        }
      }
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - Clock::now());
      if (remaining.count() <= 0) return Status::kTimeout;
      const int ready = poll(fds, n, static_cast<int>(remaining.count()));
      if (ready < 0) {
        if (errno == EINTR) continue;
        return Status::kClosed;
      }
      if (ready == 0) return Status::kTimeout;

      for (nfds_t i = 0; i < n; ++i) {
        if (want_write && fds[i].fd == write_fd_ &&
            (fds[i].revents & (POLLOUT | POLLERR))) {
          const ssize_t w =
              socket_ ? send(write_fd_, out.data() + sent, out.size() - sent,
                             MSG_NOSIGNAL)
                      : write(write_fd_, out.data() + sent, out.size() - sent);
          if (w < 0 && errno != EAGAIN && errno != EINTR) return Status::kClosed;
          if (w > 0) sent += static_cast<std::size_t>(w);
        }
      }
      if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
        char buf[65536];
        const ssize_t r = read(read_fd_, buf, sizeof buf);
        if (r == 0) return Status::kClosed;
        if (r < 0) {
          if (errno == EAGAIN || errno == EINTR) continue;
          return Status::kClosed;
        }
        inbuf_.append(buf, static_cast<std::size_t>(r));
        std::size_t nl;
        while (!finished && (nl = inbuf_.find('\n')) != std::string::npos) {
          std::string line = inbuf_.substr(0, nl);
          inbuf_.erase(0, nl + 1);
          if (!line.empty() && line.back() == '\r') line.pop_back();
          deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
          if (line.empty()) continue;
          finished = on_line(line);
        }
      }
    }
    return Status::kDone;
  }

 private:
  Channel() = default;

  int read_fd_ = -1;
  int write_fd_ = -1;
  pid_t pid_ = -1;
  bool socket_ = false;
  std::string inbuf_;
};

EndpointSpec EndpointSpec::parse(std::string_view spec) {
  EndpointSpec out;
  if (spec.substr(0, 5) == "exec:") {
    out.transport = Transport::kSubprocess;
    out.command = std::string(spec.substr(5));
    if (out.command.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "empty endpoint command");
    }
    return out;
  }
  if (spec.substr(0, 4) == "tcp:") {
    const std::string_view rest = spec.substr(4);
    const std::size_t colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
      throw Error(ErrorKind::kInvalidArgument,
                  "expected tcp:<host>:<port>, got '" + std::string(spec) + "'");
    }
    out.transport = Transport::kTcp;
    out.host = std::string(rest.substr(0, colon));
    const std::string port(rest.substr(colon + 1));
    char* end = nullptr;
    const unsigned long p = std::strtoul(port.c_str(), &end, 10);
    if (port.empty() || *end != '\0' || p == 0 || p > 65535) {
      throw Error(ErrorKind::kInvalidArgument, "bad port '" + port + "'");
    }
    out.port = static_cast<std::uint16_t>(p);
    return out;
  }
  throw Error(ErrorKind::kInvalidArgument,
              "endpoint must start with exec: or tcp:, got '" +
                  std::string(spec) + "'");
}

std::string request_line(const std::string& id, Task task, const Query& query) {
  nlohmann::ordered_json request;
  request["id"] = id;
  request["task"] = task_name(task);
  request["scenario"] = query.scenario;
  request["events"] = query.events;
  return request.dump();
}

EndpointClient::EndpointClient(EndpointSpec spec) : spec_(std::move(spec)) {
  if (spec_.max_batch == 0) spec_.max_batch = 1;
  channel_ = spec_.transport == EndpointSpec::Transport::kSubprocess
                 ? Channel::spawn(spec_.command)
                 : Channel::connect_tcp(spec_.host, spec_.port);

  std::string reply;
  const auto status = channel_->exchange(
      "{\"hello\":{\"protocol\":1}}\n",
      [&](std::string_view line) {
        reply = std::string(line);
        return true;
      },
      spec_.timeout_ms);
  if (status == Channel::Status::kTimeout) {
    channel_.reset();
    throw Error(ErrorKind::kEndpointTimeout, "no handshake reply");
  }
  if (status == Channel::Status::kClosed) {
    channel_.reset();
    unavailable("worker closed the connection during handshake");
  }
  try {
    const auto doc = nlohmann::json::parse(reply);
    for (const auto& t : doc.at("ready").at("tasks")) {
      if (auto task = parse_task(t.get<std::string>())) tasks_.insert(*task);
    }
  } catch (const nlohmann::json::exception&) {
    channel_.reset();
    throw Error(ErrorKind::kEndpointProtocolError,
                "bad handshake reply '" + reply + "'");
  }
}

EndpointClient::~EndpointClient() = default;

bool EndpointClient::supports(Task task) const { return tasks_.count(task) > 0; }

std::vector<Verdict> EndpointClient::predict(Task task,
                                             std::span<const Query> queries) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!channel_) unavailable("connection is closed");
  if (!supports(task)) {
    throw Error(ErrorKind::kInvalidArgument,
                "worker does not serve task " + std::string(task_name(task)));
  }
  std::vector<Verdict> out(queries.size());
  try {
    for (std::size_t start = 0; start < queries.size();
         start += spec_.max_batch) {
      const std::size_t n = std::min(spec_.max_batch, queries.size() - start);
      predict_chunk(task, queries.subspan(start, n),
                    std::span<Verdict>(out).subspan(start, n));
    }
  } catch (const Error&) {
    channel_.reset();
    throw;
  }
  return out;
}

void EndpointClient::predict_chunk(Task task, std::span<const Query> queries,
                                   std::span<Verdict> out) {
  std::map<std::string, std::size_t> pending;
  std::vector<std::string> ids;
  std::string payload;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    std::string id = std::to_string(next_id_++);
    payload += request_line(id, task, queries[i]);
    payload += '\n';
    pending.emplace(id, i);
    ids.push_back(std::move(id));
  }

  auto on_line = [&](std::string_view line) {
    nlohmann::json response;
    try {
      response = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(ErrorKind::kEndpointProtocolError,
                  "unparseable response '" + std::string(line) + "'");
    }
    if (!response.is_object() || !response.contains("id") ||
        !response["id"].is_string()) {
      throw Error(ErrorKind::kEndpointProtocolError,
                  "response without string id '" + std::string(line) + "'");
    }
    const std::string id = response["id"].get<std::string>();
    auto it = pending.find(id);
    if (it == pending.end()) {
      throw Error(ErrorKind::kEndpointProtocolError,
                  "response for unknown or answered id", {id});
    }
    if (response.contains("error")) {
      throw Error(ErrorKind::kEndpointWorkerError,
                  "worker rejected request " + id + ": " +
                      response["error"].dump(),
                  {id});
    }
    const auto& label = response.contains("label") ? response["label"]
                                                   : nlohmann::json();
    const auto& score = response.contains("score") ? response["score"]
                                                   : nlohmann::json();
    if (!label.is_number_integer() || !score.is_number()) {
      throw Error(ErrorKind::kEndpointProtocolError,
                  "response needs integer label and numeric score", {id});
    }
    const int l = label.get<int>();
    const double s = score.get<double>();
    if ((l != 0 && l != 1) || !(s >= 0.0 && s <= 1.0) ||
        l != verdict_from_score(s).label) {
      throw Error(ErrorKind::kEndpointProtocolError,
                  "inconsistent verdict " + std::string(line), {id});
    }
    out[it->second] = Verdict{l, s};
    pending.erase(it);
    return pending.empty();
  };

  const auto status =
      channel_->exchange(std::move(payload), on_line, spec_.timeout_ms);
  if (status == Channel::Status::kDone) return;
  std::vector<std::string> unanswered;
  for (const auto& id : ids) {
    if (pending.count(id)) unanswered.push_back(id);
  }
  throw Error(ErrorKind::kEndpointTimeout,
              std::to_string(unanswered.size()) + " request(s) unanswered" +
                  (status == Channel::Status::kClosed
                       ? " (worker closed the connection)"
                       : ""),
              std::move(unanswered));
}

}  // namespace sif
