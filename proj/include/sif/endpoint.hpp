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

// Client for out-of-process classifier workers.
//
// Wire protocol: UTF-8 JSON, one object per LF-terminated line, over a
// subprocess's stdin/stdout or a TCP stream.
//
//   client -> worker  {"hello":{"protocol":1}}
//   worker -> client  {"ready":{"tasks":["relevance","temporal"]}}
//   client -> worker  {"id":"7","task":"temporal","scenario":"baking a cake",
//                      "events":["preheat oven","bake the cake"]}
//   worker -> client  {"id":"7","label":1,"score":0.93}
//                  or {"id":"7","error":"..."}
//
// Responses may arrive in any order; verdicts are matched back by id.

#ifndef SIF_ENDPOINT_HPP_
#define SIF_ENDPOINT_HPP_

#include <cstdint>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>

#include "sif/classifier.hpp"

namespace sif {

struct EndpointSpec {
  enum class Transport { kSubprocess, kTcp };

  Transport transport = Transport::kSubprocess;
  std::string command;  // run with /bin/sh -c
  std::string host;
  std::uint16_t port = 0;
  // Longest wait for the next response line.
  int timeout_ms = 30000;
  std::size_t max_batch = 64;

  // "exec:<shell command>" or "tcp:<host>:<port>".
  static EndpointSpec parse(std::string_view spec);
};

std::string request_line(const std::string& id, Task task, const Query& query);

class EndpointClient : public Classifier {
 public:
  // Connects and performs the handshake. Throws kEndpointUnavailable,
  // kEndpointTimeout or kEndpointProtocolError.
  explicit EndpointClient(EndpointSpec spec);
  ~EndpointClient() override;

  EndpointClient(const EndpointClient&) = delete;
  EndpointClient& operator=(const EndpointClient&) = delete;

  bool supports(Task task) const override;

  // Sends queries in chunks of max_batch. Concurrent callers are serialized.
  // Throws kEndpointTimeout (ids: every unanswered request),
  // kEndpointProtocolError (ids: the offending request, when known) and
  // kEndpointWorkerError (ids: the request the worker rejected). After any
  // of these the connection is closed and later calls throw
  // kEndpointUnavailable.
  std::vector<Verdict> predict(Task task,
                               std::span<const Query> queries) override;

 private:
  class Channel;

  void predict_chunk(Task task, std::span<const Query> queries,
                     std::span<Verdict> out);

  EndpointSpec spec_;
  std::unique_ptr<Channel> channel_;
  std::set<Task> tasks_;
  std::uint64_t next_id_ = 1;
  std::mutex mu_;
};

}  // namespace sif

#endif  // SIF_ENDPOINT_HPP_
