#include "askdb/http_server.hpp"

#include <httplib.h>

#include "askdb/error.hpp"

namespace askdb {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, const std::string& message) {
  send_json(res, json{{"error", message}, {"kind", kind}}, status);
}

// Runs a handler, turning pipeline failures into JSON error bodies.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, http_status_for(e), e.kind(), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "InvalidRequest", std::string("malformed JSON: ") + e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "InternalError", e.what());
    }
  };
}

json database_json(const OnboardedDatabase& db) {
  return json{{"id", db.id}, {"created_at", db.created_at}, {"status", "ready"},
              {"schema", json::parse(schema_to_json(db))}};
}

}  // namespace

HttpServer::HttpServer(Service& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;

  s.Post("/databases", guarded([this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_file("file")) throw InvalidRequest("multipart field 'file' is required");
    const auto file = req.get_file_value("file");
    OnboardingConfig config;
    if (req.has_file("config")) config = OnboardingConfig::from_json(req.get_file_value("config").content);
    std::string name = file.filename.empty() ? "upload.csv" : file.filename;
    send_json(res, database_json(service_.onboard(name, file.content, config)), 201);
  }));

  s.Get("/databases", guarded([this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& db : service_.list_databases()) out.push_back(database_json(db));
    send_json(res, out);
  }));

  s.Post(R"(/databases/([^/]+)/query)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body);
    if (!body.contains("query") || !body["query"].is_string()) {
      throw InvalidRequest("body must contain a string 'query'");
    }
    std::optional<CivilDate> reference;
    if (body.contains("reference_time") && !body["reference_time"].is_null()) {
      reference = parse_reference_date(body["reference_time"].get<std::string>());
    }
    auto response = service_.query(req.matches[1], body["query"].get<std::string>(), reference);
    send_json(res, response.to_json());
  }));

  s.Get(R"(/databases/([^/]+)/history)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    std::size_t page = 1;
    if (req.has_param("page")) {
      try {
        long long p = std::stoll(req.get_param_value("page"));
        if (p < 1) throw InvalidRequest("page must be at least 1");
        page = static_cast<std::size_t>(p);
      } catch (const std::logic_error&) {
        throw InvalidRequest("page must be a number");
      }
    }
    json out = json::array();
    for (const auto& e : service_.history(req.matches[1], page)) out.push_back(e.to_json());
    send_json(res, json{{"page", page}, {"entries", out}});
  }));

  s.Get(R"(/results/([^/]+)/csv)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    res.set_content(service_.result_csv(id), "text/csv; charset=utf-8");
    res.set_header("Content-Disposition", "attachment; filename=\"" + id + ".csv\"");
  }));

  s.Get(R"(/results/([^/]+)/visualizations)",
        guarded([this](const httplib::Request& req, httplib::Response& res) {
          send_json(res, viz::to_json(service_.result_visualizations(req.matches[1])));
        }));
}

HttpServer::~HttpServer() = default;

bool HttpServer::listen(const std::string& host, int port) { return server_->listen(host, port); }

int HttpServer::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool HttpServer::listen_after_bind() { return server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace askdb
