#pragma once

#include <cstddef>
#include <future>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "tpms/brick.hpp"

namespace tpms {

/// Lower-case hex SHA-256 of the canonical spec JSON.
std::string job_id(const BrickSpec& spec);

struct JobRecord {
  enum class Status { done, failed };
  std::string id;
  BrickSpec spec;
  Status status = Status::done;
  std::optional<MeshReport> report;
  /// "Code: message" for failed jobs.
  std::optional<std::string> error;
};

nlohmann::json to_json(const JobRecord& job);

/// HTTP status for a failed generate request.
int http_status(ErrorCode code);

/// Request handling independent of the transport, so it can be exercised
/// without sockets. HttpServer wires it to routes.
class Service {
 public:
  struct Options {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::size_t capacity = 64;
  };

  struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
  };

  Service() : Service(Options{}) {}
  explicit Service(Options options);

  Response surfaces() const;
  Response generate(std::string_view body);
  Response mesh(std::string_view id);
  Response report(std::string_view id);

  /// Number of brick builds actually run, for observing coalescing and caching.
  std::size_t builds_started() const;
  std::size_t stored_jobs() const;

 private:
  struct Entry {
    int status = 200;
    JobRecord record;
    std::string stl;
  };
  using EntryPtr = std::shared_ptr<const Entry>;

  EntryPtr lookup(const std::string& id);
  void store(const EntryPtr& entry);
  EntryPtr run(const BrickSpec& spec, const std::string& id);

  Options options_;
  std::counting_semaphore<> workers_;

  mutable std::mutex mutex_;
  std::list<std::string> recency_;  // front = most recent
  std::unordered_map<std::string, std::pair<EntryPtr, std::list<std::string>::iterator>> jobs_;
  std::map<std::string, std::shared_future<EntryPtr>> in_flight_;
  std::size_t builds_started_ = 0;
};

/// cpp-httplib front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds without accepting yet; port 0 picks a free port. Returns the port.
  int bind(const std::string& host, int port);
  /// Accepts connections until stop(); blocks the caller.
  void listen();
  /// listen() on a background thread, returning once it accepts.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tpms
