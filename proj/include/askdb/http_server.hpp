#pragma once

#include <memory>
#include <string>

#include "askdb/service.hpp"

namespace httplib {
class Server;
}

namespace askdb {

// JSON API over a Service:
//   POST /databases                       multipart "file" (+ optional "config")
//   GET  /databases
//   POST /databases/{id}/query            {"query", "reference_time"?}
//   GET  /databases/{id}/history?page=N
//   GET  /results/{rid}/csv
//   GET  /results/{rid}/visualizations
// Failures answer {"error", "kind"} with the status from http_status_for.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Blocks until stop() is called.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it; serve with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  Service& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace askdb
