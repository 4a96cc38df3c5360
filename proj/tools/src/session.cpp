#include "harmony_tools/session.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <optional>

#include <spdlog/spdlog.h>

#include "harmony_tools/commands.hpp"
#include "harmony_tools/solution.hpp"

namespace harmony::service {

namespace {

constexpr std::size_t kMaxLine = 1 << 20;

Json error_message(const std::string& code, const std::string& message, const std::string& session = "") {
  Json j;
  j["type"] = "error";
  if (!session.empty()) j["session"] = session;
  j["code"] = code;
  j["message"] = message;
  return j;
}

struct Aborted : std::runtime_error {
  Aborted() : std::runtime_error("session aborted") {}
};

struct QueryBudgetExhausted : std::runtime_error {
  QueryBudgetExhausted() : std::runtime_error("query budget exhausted") {}
};

}  // namespace

// ---------------------------------------------------------------------------

class Connection {
 public:
  explicit Connection(int fd) : fd_(fd) {}
  ~Connection() { ::close(fd_); }

  bool send(const Json& message) {
    std::string line = message.dump() + "\n";
    std::lock_guard lock(write_mutex_);
    std::size_t sent = 0;
    while (sent < line.size()) {
      ssize_t n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) return false;
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  /// Next newline-terminated line; nullopt on EOF, error or an oversized line.
  std::optional<std::string> read_line() {
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (buffer_.size() > kMaxLine) return std::nullopt;
      char chunk[4096];
      ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n <= 0) return std::nullopt;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void close() { ::shutdown(fd_, SHUT_RDWR); }

 private:
  int fd_;
  std::mutex write_mutex_;
  std::string buffer_;
};

// ---------------------------------------------------------------------------

class Session {
 public:
  Session(std::string id, const ProblemSpec& spec, SolverConfig config, std::size_t budget)
      : id_(std::move(id)), spec_(spec), config_(std::move(config)), budget_(budget) {}

  ~Session() {
    abort();
    if (thread_.joinable()) thread_.join();
  }

  const std::string& id() const { return id_; }

  void start() {
    thread_ = std::jthread([this] { run(); });
  }

  Json hello_message() const {
    Json j;
    j["type"] = "session";
    j["session"] = id_;
    j["variant"] = to_string(spec_.variant);
    j["rooms"] = Json::array();
    for (const auto& r : spec_.rooms) j["rooms"].push_back({{"name", r.name}, {"capacity", r.capacity}});
    j["agents"] = Json::array();
    for (const auto& a : spec_.agents) {
      j["agents"].push_back({{"name", a.name}, {"interactive", a.oracle.family == "interactive"}});
    }
    j["free_room_closure"] = closure();
    j["query_budget"] = budget_;
    return j;
  }

  void attach(const std::shared_ptr<Connection>& connection) {
    std::lock_guard lock(mutex_);
    connection_ = connection;
    if (final_) {
      send(*final_);
    } else if (pending_) {
      send(query_message());
    }
  }

  void detach(const Connection* connection) {
    std::lock_guard lock(mutex_);
    if (connection_.get() == connection) connection_.reset();
  }

  void answer(const std::shared_ptr<Connection>& from, const Json& msg) {
    std::lock_guard lock(mutex_);
    auto reply = [&](const Json& m) { from->send(m); };
    if (!pending_) {
      reply(error_message("out-of-order", "no query is pending", id_));
      return;
    }
    const std::string& expected = spec_.agents[pending_->agent].name;
    if (!msg.contains("agent") || !msg["agent"].is_string() || msg["agent"].get<std::string>() != expected) {
      reply(error_message("out-of-order", "the pending query is for agent '" + expected + "'", id_));
      return;
    }
    if (msg.contains("round") && (!msg["round"].is_number_unsigned() || msg["round"].get<std::uint64_t>() != pending_->round)) {
      reply(error_message("out-of-order", "the pending query is round " + std::to_string(pending_->round), id_));
      return;
    }
    if (!msg.contains("rooms") || !msg["rooms"].is_array()) {
      reply(error_message("bad-message", "answer needs a \"rooms\" array", id_));
      reply(query_message());
      return;
    }
    if (msg["rooms"].empty()) {
      reply(error_message("empty-answer", "select at least one room", id_));
      reply(query_message());
      return;
    }
    RoomSet chosen;
    for (const auto& item : msg["rooms"]) {
      std::optional<std::size_t> index;
      if (item.is_string()) {
        for (std::size_t r = 0; r < spec_.rooms.size(); ++r) {
          if (spec_.rooms[r].name == item.get<std::string>()) index = r;
        }
      }
      if (!index) {
        reply(error_message("unknown-room", "unknown room " + item.dump(), id_));
        reply(query_message());
        return;
      }
      chosen.insert(*index);
    }
    RoomSet added;
    if (closure()) {
      for (auto r : pending_->free.members()) {
        if (!chosen.contains(r)) added.insert(r);
      }
    }
    Json ack;
    ack["type"] = "accepted";
    ack["session"] = id_;
    ack["agent"] = expected;
    ack["round"] = pending_->round;
    ack["rooms"] = names(chosen | added);
    ack["auto_added"] = names(added);
    reply(ack);
    answer_ = chosen | added;
    pending_.reset();
    cv_.notify_all();
  }

  void abort() {
    std::lock_guard lock(mutex_);
    aborted_ = true;
    cv_.notify_all();
  }

 private:
  struct Pending {
    std::size_t agent = 0;
    std::vector<Rational> prices;
    std::uint64_t round = 0;
    RoomSet free;
  };

  bool closure() const { return spec_.variant == Variant::rental && spec_.free_room_closure; }

  Json names(RoomSet set) const {
    Json out = Json::array();
    for (auto r : set.members()) out.push_back(spec_.rooms[r].name);
    return out;
  }

  /// Caller holds mutex_.
  void send(const Json& message) {
    if (connection_) connection_->send(message);
  }

  /// Caller holds mutex_.
  Json query_message() const {
    Json j;
    j["type"] = "query";
    j["session"] = id_;
    j["agent"] = spec_.agents[pending_->agent].name;
    j["round"] = pending_->round;
    j["prices"] = Json::array();
    for (std::size_t r = 0; r < pending_->prices.size(); ++r) {
      Json p = rational_json(pending_->prices[r]);
      Json entry;
      entry["room"] = spec_.rooms[r].name;
      entry["capacity"] = spec_.rooms[r].capacity;
      entry["rational"] = p["rational"];
      entry["decimal"] = p["decimal"];
      entry["per_unit"] = rational_json(pending_->prices[r] / spec_.rooms[r].capacity);
      j["prices"].push_back(entry);
    }
    j["free_rooms"] = names(pending_->free);
    return j;
  }

  RoomSet ask(std::size_t agent, const std::vector<Rational>& prices) {
    std::string key = std::to_string(agent);
    for (const auto& p : prices) key += " " + to_string(p);

    std::unique_lock lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    if (aborted_) throw Aborted();
    if (asked_ >= budget_) {
      budget_exhausted_ = true;
      throw QueryBudgetExhausted();
    }
    asked_ += 1;
    Pending q;
    q.agent = agent;
    q.prices = prices;
    q.round = asked_;
    if (spec_.variant != Variant::exchange) {
      for (std::size_t r = 0; r < prices.size(); ++r) {
        if (prices[r] == 0) q.free.insert(r);
      }
    }
    pending_ = std::move(q);
    send(query_message());
    cv_.wait(lock, [&] { return answer_.has_value() || aborted_; });
    if (aborted_) throw Aborted();
    RoomSet result = *answer_;
    answer_.reset();
    cache_.emplace(std::move(key), result);
    return result;
  }

  void run() {
    Json final;
    try {
      SolverConfig config = config_;
      config.on_progress = [this](const SolverProgress& p) {
        std::lock_guard lock(mutex_);
        Json j;
        j["type"] = "progress";
        j["session"] = id_;
        j["level"] = p.level;
        j["mesh"] = p.mesh;
        j["cells"] = p.cells;
        j["queries"] = asked_;
        j["oracle_queries"] = p.queries;
        send(j);
      };
      SolutionDoc doc = solve_problem(spec_, config, [this](std::size_t i, const std::vector<Rational>& p) {
        return ask(i, p);
      });
      final["type"] = "result";
      final["session"] = id_;
      final["queries"] = asked_;
      final["solution"] = solution_to_json(doc);
    } catch (const std::exception& e) {
      std::lock_guard lock(mutex_);
      if (aborted_) {
        final = Json{{"type", "aborted"}, {"session", id_}};
      } else if (budget_exhausted_) {
        final = error_message("query-budget-exhausted",
                              "the session asked " + std::to_string(asked_) + " questions without converging", id_);
      } else {
        final = error_message("solver-error", e.what(), id_);
      }
    }
    std::lock_guard lock(mutex_);
    final_ = final;
    pending_.reset();
    send(final);
    spdlog::info("session {} finished: {}", id_, final["type"].get<std::string>());
  }

  std::string id_;
  const ProblemSpec& spec_;
  SolverConfig config_;
  std::size_t budget_;

  std::mutex mutex_;
  std::condition_variable cv_;
  std::shared_ptr<Connection> connection_;
  std::optional<Pending> pending_;
  std::optional<RoomSet> answer_;
  std::optional<Json> final_;
  std::unordered_map<std::string, RoomSet> cache_;
  std::uint64_t asked_ = 0;
  bool aborted_ = false;
  bool budget_exhausted_ = false;
  std::jthread thread_;
};

// ---------------------------------------------------------------------------

SessionServer::SessionServer(ProblemSpec spec, SolverConfig config, std::uint16_t port, SessionOptions options)
    : spec_(std::move(spec)), config_(std::move(config)), options_(options) {
  if (!spec_.has_interactive()) throw InputError("serve needs at least one interactive agent");
  config_.validate();
  if (options_.query_budget == 0) options_.query_budget = config_.vertex_budget;

  listener_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener_ < 0) throw std::runtime_error("cannot create socket");
  int yes = 1;
  ::setsockopt(listener_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listener_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listener_, 16) < 0) {
    ::close(listener_);
    throw std::runtime_error("cannot listen on 127.0.0.1:" + std::to_string(port));
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

SessionServer::~SessionServer() {
  stop();
  ::close(listener_);
}

void SessionServer::serve() {
  spdlog::info("listening on 127.0.0.1:{}", port_);
  while (!stopping_) {
    int fd = ::accept(listener_, nullptr, nullptr);
    if (fd < 0) {
      if (stopping_) break;
      continue;
    }
    auto connection = std::make_shared<Connection>(fd);
    std::lock_guard lock(mutex_);
    if (stopping_) {
      connection->close();
      break;
    }
    connections_.push_back(connection);
    readers_.emplace_back([this, connection] { handle(connection); });
  }
}

void SessionServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listener_, SHUT_RDWR);
  std::vector<std::jthread> readers;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions;
  {
    std::lock_guard lock(mutex_);
    for (auto& c : connections_) c->close();
    for (auto& [_, s] : sessions_) s->abort();
    readers.swap(readers_);
  }
  readers.clear();  // joins
  std::lock_guard lock(mutex_);
  sessions.swap(sessions_);
  connections_.clear();
}

std::shared_ptr<Session> SessionServer::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

void SessionServer::handle(std::shared_ptr<Connection> connection) {
  while (auto line = connection->read_line()) {
    if (line->empty()) continue;
    dispatch(connection, *line);
  }
  std::lock_guard lock(mutex_);
  for (auto& [_, s] : sessions_) s->detach(connection.get());
}

void SessionServer::dispatch(const std::shared_ptr<Connection>& connection, const std::string& line) {
  Json msg;
  try {
    msg = Json::parse(line);
  } catch (const Json::parse_error&) {
    connection->send(error_message("bad-message", "message is not valid JSON"));
    return;
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    connection->send(error_message("bad-message", "message needs a string \"type\""));
    return;
  }
  std::string type = msg["type"].get<std::string>();

  if (type == "hello") {
    std::shared_ptr<Session> session;
    {
      std::lock_guard lock(mutex_);
      std::string id = "session-" + std::to_string(next_session_++);
      session = std::make_shared<Session>(id, spec_, config_, options_.query_budget);
      sessions_.emplace(id, session);
    }
    connection->send(session->hello_message());
    session->attach(connection);
    session->start();
    return;
  }

  if (type != "resume" && type != "answer" && type != "abort") {
    connection->send(error_message("bad-message", "unknown message type '" + type + "'"));
    return;
  }
  if (!msg.contains("session") || !msg["session"].is_string()) {
    connection->send(error_message("bad-message", "message needs a string \"session\""));
    return;
  }
  std::string id = msg["session"].get<std::string>();
  auto session = find(id);
  if (!session) {
    connection->send(error_message("unknown-session", "no session '" + id + "'"));
    return;
  }
  if (type == "resume") {
    connection->send(session->hello_message());
    session->attach(connection);
  } else if (type == "answer") {
    session->answer(connection, msg);
  } else {
    session->abort();
  }
}

}  // namespace harmony::service
