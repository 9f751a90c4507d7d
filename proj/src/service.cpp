#include "tpms/service.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <regex>

#include "httplib.h"
#include "tpms/io.hpp"

namespace tpms {
namespace {

using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidArgument, "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  char byte[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

Service::Response json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

Service::Response error_response(int status, const std::string& message) {
  return json_response(status, {{"id", nullptr}, {"status", "failed"}, {"report", nullptr}, {"error", message}});
}

json surface_listing() {
  json rows = json::array();
  for (SurfaceKind kind : kAllSurfaces) {
    const SymmetryInfo info = symmetry_descriptor(kind);
    rows.push_back({{"name", surface_name(kind)},
                    {"triply_periodic", info.triply_periodic},
                    {"symmetry", symmetry_name(info.symmetry)}});
  }
  return rows;
}

}  // namespace

std::string job_id(const BrickSpec& spec) { return sha256_hex(canonical_json(spec)); }

json to_json(const JobRecord& job) {
  return {{"id", job.id},
          {"spec", to_json(job.spec)},
          {"status", job.status == JobRecord::Status::done ? "done" : "failed"},
          {"report", job.report ? to_json(*job.report) : json()},
          {"error", job.error ? json(*job.error) : json()}};
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidThickness:
    case ErrorCode::NonFinite:
    case ErrorCode::EnvelopeExceeded:
    case ErrorCode::Malformed:
      return 422;
    case ErrorCode::CapExceeded:
      return 413;
    case ErrorCode::TargetUnreachable:
    case ErrorCode::NonMonotone:
    case ErrorCode::ResolutionTooCoarse:
      return 409;
    default:
      return 500;
  }
}

Service::Service(Options options)
    : options_(options), workers_(static_cast<std::ptrdiff_t>(std::max(1u, options.workers))) {}

Service::Response Service::surfaces() const { return json_response(200, surface_listing()); }

Service::EntryPtr Service::lookup(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return nullptr;
  recency_.splice(recency_.begin(), recency_, it->second.second);
  return it->second.first;
}

void Service::store(const EntryPtr& entry) {
  std::lock_guard lock(mutex_);
  const std::string& id = entry->record.id;
  if (auto it = jobs_.find(id); it != jobs_.end()) {
    recency_.splice(recency_.begin(), recency_, it->second.second);
    it->second.first = entry;
    return;
  }
  recency_.push_front(id);
  jobs_.emplace(id, std::make_pair(entry, recency_.begin()));
  while (jobs_.size() > options_.capacity) {
    jobs_.erase(recency_.back());
    recency_.pop_back();
  }
}

Service::EntryPtr Service::run(const BrickSpec& spec, const std::string& id) {
  workers_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{workers_};

  auto entry = std::make_shared<Entry>();
  entry->record.id = id;
  entry->record.spec = spec;
  try {
    BrickResult result = build_brick(spec);
    entry->record.report = std::move(result.report);
    entry->stl = stl_binary_bytes(result.mesh);
  } catch (const Error& e) {
    entry->status = http_status(e.code());
    entry->record.status = JobRecord::Status::failed;
    entry->record.error = e.what();
  } catch (const std::exception& e) {
    entry->status = 500;
    entry->record.status = JobRecord::Status::failed;
    entry->record.error = std::string("Internal: ") + e.what();
  }
  return entry;
}

Service::Response Service::generate(std::string_view body) {
  BrickSpec spec;
  try {
    spec = brick_spec_from_json(json::parse(body));
    spec.validate();
  } catch (const json::exception& e) {
    return error_response(422, std::string(code_name(ErrorCode::InvalidSpec)) + ": " + e.what());
  } catch (const Error& e) {
    return error_response(http_status(e.code()), e.what());
  }
  const std::string id = job_id(spec);

  EntryPtr entry = lookup(id);
  if (!entry) {
    std::promise<EntryPtr> promise;
    std::shared_future<EntryPtr> future;
    bool owner = false;
    {
      std::lock_guard lock(mutex_);
      if (auto it = in_flight_.find(id); it != in_flight_.end()) {
        future = it->second;
      } else {
        future = promise.get_future().share();
        in_flight_.emplace(id, future);
        owner = true;
        ++builds_started_;
      }
    }
    if (owner) {
      entry = run(spec, id);
      store(entry);
      {
        std::lock_guard lock(mutex_);
        in_flight_.erase(id);
      }
      promise.set_value(entry);
    } else {
      entry = future.get();
    }
  }
  return json_response(entry->status, to_json(entry->record));
}

Service::Response Service::mesh(std::string_view id) {
  EntryPtr entry = lookup(std::string(id));
  if (!entry || entry->record.status != JobRecord::Status::done) {
    return json_response(404, {{"error", "unknown job id"}});
  }
  return {200, "application/octet-stream", entry->stl};
}

Service::Response Service::report(std::string_view id) {
  EntryPtr entry = lookup(std::string(id));
  if (!entry || !entry->record.report) return json_response(404, {{"error", "unknown job id"}});
  return json_response(200, to_json(*entry->record.report));
}

std::size_t Service::builds_started() const {
  std::lock_guard lock(mutex_);
  return builds_started_;
}

std::size_t Service::stored_jobs() const {
  std::lock_guard lock(mutex_);
  return jobs_.size();
}

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(Service& s) : service(s) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    auto send = [](httplib::Response& res, const Service::Response& r) {
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    server.Get("/api/surfaces",
               [this, send](const httplib::Request&, httplib::Response& res) { send(res, service.surfaces()); });
    server.Post("/api/generate", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service.generate(req.body));
    });
    server.Get(R"(/api/mesh/([^/]+)\.stl)", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service.mesh(req.matches[1].str()));
    });
    server.Get(R"(/api/mesh/([^/]+))", [send](const httplib::Request&, httplib::Response& res) {
      send(res, {404, "application/json", R"({"error":"unknown job id"})"});
    });
    server.Get(R"(/api/report/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service.report(req.matches[1].str()));
    });
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::SinkError, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::SinkError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace tpms
