#pragma once

// Interactive elicitation sessions over newline-delimited JSON on a local TCP
// socket. Each session runs one solver whose interactive agents are answered
// by the connected client, one query at a time.
//
// client -> server
//   {"type":"hello"}
//   {"type":"resume","session":S}
//   {"type":"answer","session":S,"agent":NAME,"round":K,"rooms":[ROOM,...]}
//   {"type":"abort","session":S}
// server -> client
//   {"type":"session","session":S,"variant":...,"rooms":[...],"agents":[...]}
//   {"type":"query","session":S,"agent":NAME,"round":K,"prices":[...],"free_rooms":[...]}
//   {"type":"accepted","session":S,"agent":NAME,"round":K,"rooms":[...],"auto_added":[...]}
//   {"type":"progress","session":S,"mesh":M,"cells":C,"queries":Q}
//   {"type":"result","session":S,"solution":{...}}
//   {"type":"aborted","session":S}
//   {"type":"error","code":CODE,"message":...}
//
// Error codes: bad-message, unknown-session, out-of-order, empty-answer,
// unknown-room, query-budget-exhausted, solver-error. After empty-answer and
// unknown-room the pending query is sent again.

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <vector>

#include "harmony_tools/problem.hpp"

namespace harmony::service {

class Session;
class Connection;

struct SessionOptions {
  /// Upper bound on distinct questions put to the client per session; 0 means
  /// the solver's vertex budget.
  std::size_t query_budget = 0;
};

class SessionServer {
 public:
  /// Binds 127.0.0.1:port immediately; port 0 picks a free port.
  SessionServer(ProblemSpec spec, SolverConfig config, std::uint16_t port, SessionOptions options = {});
  ~SessionServer();

  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  std::uint16_t port() const { return port_; }

  /// Accepts connections until stop() is called.
  void serve();
  /// Closes the listener, aborts every session and joins all threads.
  void stop();

 private:
  void handle(std::shared_ptr<Connection> connection);
  void dispatch(const std::shared_ptr<Connection>& connection, const std::string& line);
  std::shared_ptr<Session> find(const std::string& id);

  ProblemSpec spec_;
  SolverConfig config_;
  SessionOptions options_;
  int listener_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};

  std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
  std::vector<std::shared_ptr<Connection>> connections_;
  std::vector<std::jthread> readers_;
  std::uint64_t next_session_ = 1;
};

}  // namespace harmony::service
