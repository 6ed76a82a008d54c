// Command-line front end: onboard files, ask questions, explain SQL and run
// the HTTP API.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "askdb/error.hpp"
#include "askdb/http_server.hpp"
#include "askdb/service.hpp"
#include "askdb/sql_explainer.hpp"
#include "askdb/sql_parser.hpp"

namespace {

std::string default_data_root() {
  if (const char* env = std::getenv("ASKDB_HOME"); env && *env) return env;
  return "askdb_data";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw askdb::InvalidRequest("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct BackendFlags {
  std::string fixtures = askdb::default_data_dir() + "/fixtures/translations.json";
  std::string backend_url;

  std::shared_ptr<askdb::Translator> make() const {
    if (!backend_url.empty()) return std::make_shared<askdb::RemoteTranslator>(backend_url);
    return std::make_shared<askdb::FixtureTranslator>(askdb::FixtureTranslator::load(fixtures));
  }
};

void add_backend_flags(CLI::App* cmd, BackendFlags& flags) {
  cmd->add_option("--fixtures", flags.fixtures, "Fixture translations (JSON)");
  cmd->add_option("--backend", flags.backend_url, "Remote translator base URL, e.g. http://localhost:8500");
}

askdb::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ask questions of a database in plain English"};
  app.require_subcommand(1);

  std::string data_root = default_data_root();
  app.add_option("--data-root", data_root, "Where onboarded databases and history live")
      ->capture_default_str();
  BackendFlags backend;

  auto* onboard = app.add_subcommand("onboard", "Onboard a CSV or SQLite file");
  std::string source, config_path;
  onboard->add_option("file", source, "CSV or SQLite file")->required()->check(CLI::ExistingFile);
  onboard->add_option("--config", config_path, "Onboarding config (JSON)")->check(CLI::ExistingFile);

  auto* query = app.add_subcommand("query", "Ask a question of an onboarded database");
  std::string db_id, question, reference;
  bool as_json = false;
  query->add_option("db", db_id, "Database id")->required();
  query->add_option("text", question, "The question")->required();
  query->add_option("--reference-time", reference, "Date that 'today' refers to (YYYY-MM-DD)");
  query->add_flag("--json", as_json, "Print the full response as JSON");
  add_backend_flags(query, backend);

  auto* explain = app.add_subcommand("explain", "Summarize a SQL query in plain English");
  std::string sql_text;
  explain->add_option("sql", sql_text, "SELECT statement")->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  add_backend_flags(serve, backend);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*explain) {
      std::cout << askdb::explain(askdb::sql::parse(sql_text)).render() << "\n";
      return 0;
    }

    askdb::ServiceOptions options;
    options.data_root = data_root;
    options.translator = backend.make();
    askdb::Service service(std::move(options));

    if (*onboard) {
      askdb::OnboardingConfig config;
      if (!config_path.empty()) config = askdb::OnboardingConfig::from_json(read_file(config_path));
      auto db = service.onboard_file(source, config);
      std::cout << db.id << "\n";
      for (const auto& t : db.tables) {
        std::cout << "  " << t.name << ":";
        for (const auto& c : t.columns) std::cout << " " << c.cleaned_name << "(" << askdb::to_string(c.data_type) << ")";
        std::cout << "\n";
      }
    } else if (*query) {
      std::optional<askdb::CivilDate> ref;
      if (!reference.empty()) ref = askdb::parse_reference_date(reference);
      auto r = service.query(db_id, question, ref);
      if (as_json) {
        std::cout << r.to_json().dump(2) << "\n";
        return 0;
      }
      std::cout << r.sql << "\n" << r.explanation.render() << "\n";
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << askdb::export_csv(r.result);
    } else if (*serve) {
      askdb::HttpServer server(service);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        std::cerr << "could not listen on " << host << ":" << port << "\n";
        return 1;
      }
    }
  } catch (const askdb::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
