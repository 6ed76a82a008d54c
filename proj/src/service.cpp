#include "askdb/service.hpp"

#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "askdb/error.hpp"
#include "askdb/sqlite.hpp"
#include "askdb/text.hpp"

namespace askdb {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_utc(std::chrono::system_clock::time_point t) {
  std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CivilDate utc_date(std::chrono::system_clock::time_point t) {
  std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(t)};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day())};
}

CivilDate parse_reference_date(std::string_view text) {
  auto date = calendar::parse_iso(text.substr(0, std::min<std::size_t>(10, text.size())));
  if (!date || (text.size() > 10 && text[10] != 'T' && text[10] != ' ')) {
    throw InvalidRequest("reference_time must look like YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  return *date;
}

// ---------------------------------------------------------------------------
// History

json HistoryEntry::to_json() const {
  return json{{"id", id},
              {"database_id", database_id},
              {"query", raw_query},
              {"normalized_query", normalized_query},
              {"sql", resolved_sql},
              {"explanation", explanation},
              {"timestamp", timestamp},
              {"warnings", warnings}};
}

HistoryStore::HistoryStore(const std::string& path)
    : db_(std::make_unique<sqlite::Database>(path, sqlite::OpenMode::Create)) {
  db_->exec(
      "CREATE TABLE IF NOT EXISTS history ("
      " id INTEGER PRIMARY KEY AUTOINCREMENT,"
      " database_id TEXT NOT NULL,"
      " raw_query TEXT NOT NULL,"
      " normalized_query TEXT NOT NULL,"
      " resolved_sql TEXT NOT NULL,"
      " explanation TEXT NOT NULL,"
      " timestamp TEXT NOT NULL,"
      " warnings TEXT NOT NULL);"
      "CREATE INDEX IF NOT EXISTS history_by_db ON history(database_id, id);"
      "CREATE TABLE IF NOT EXISTS translations ("
      " database_id TEXT NOT NULL,"
      " normalized_query TEXT NOT NULL,"
      " sql TEXT NOT NULL,"
      " backend_id TEXT NOT NULL,"
      " PRIMARY KEY (database_id, normalized_query));");
}

std::int64_t HistoryStore::append(HistoryEntry e) {
  std::lock_guard lock(mu_);
  auto st = db_->prepare(
      "INSERT INTO history (database_id, raw_query, normalized_query, resolved_sql,"
      " explanation, timestamp, warnings) VALUES (?, ?, ?, ?, ?, ?, ?)");
  st.bind(1, e.database_id);
  st.bind(2, e.raw_query);
  st.bind(3, e.normalized_query);
  st.bind(4, e.resolved_sql);
  st.bind(5, e.explanation);
  st.bind(6, e.timestamp);
  st.bind(7, json(e.warnings).dump());
  st.step();
  return db_->last_insert_rowid();
}

std::vector<HistoryEntry> HistoryStore::list(const std::string& database_id, std::size_t page,
                                             std::size_t page_size) const {
  if (page == 0) throw InvalidRequest("pages start at 1");
  std::lock_guard lock(mu_);
  auto st = db_->prepare(
      "SELECT id, raw_query, normalized_query, resolved_sql, explanation, timestamp, warnings"
      " FROM history WHERE database_id = ? ORDER BY id DESC LIMIT ? OFFSET ?");
  st.bind(1, database_id);
  st.bind(2, static_cast<std::int64_t>(page_size));
  st.bind(3, static_cast<std::int64_t>((page - 1) * page_size));
  std::vector<HistoryEntry> out;
  while (st.step()) {
    HistoryEntry e;
    e.id = std::get<std::int64_t>(st.column(0));
    e.database_id = database_id;
    e.raw_query = value_to_text(st.column(1));
    e.normalized_query = value_to_text(st.column(2));
    e.resolved_sql = value_to_text(st.column(3));
    e.explanation = value_to_text(st.column(4));
    e.timestamp = value_to_text(st.column(5));
    e.warnings = json::parse(value_to_text(st.column(6))).get<std::vector<std::string>>();
    out.push_back(std::move(e));
  }
  return out;
}

void HistoryStore::save_translation(const CachedTranslation& t) {
  std::lock_guard lock(mu_);
  auto st = db_->prepare(
      "INSERT OR REPLACE INTO translations (database_id, normalized_query, sql, backend_id)"
      " VALUES (?, ?, ?, ?)");
  st.bind(1, t.database_id);
  st.bind(2, t.normalized_query);
  st.bind(3, t.sql);
  st.bind(4, t.backend_id);
  st.step();
}

std::vector<CachedTranslation> HistoryStore::load_translations() {
  std::lock_guard lock(mu_);
  auto st = db_->prepare("SELECT database_id, normalized_query, sql, backend_id FROM translations");
  std::vector<CachedTranslation> out;
  while (st.step()) {
    out.push_back({value_to_text(st.column(0)), value_to_text(st.column(1)),
                   value_to_text(st.column(2)), value_to_text(st.column(3))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Responses

json QueryResponse::to_json() const {
  json columns = json::array();
  for (const auto& c : result.columns) columns.push_back({{"name", c.name}, {"type", to_string(c.data_type)}});
  json rows = json::array();
  for (const auto& r : result.rows) {
    json row = json::array();
    for (const auto& v : r) {
      if (is_null(v)) {
        row.push_back(nullptr);
      } else if (const auto* i = std::get_if<std::int64_t>(&v)) {
        row.push_back(*i);
      } else if (const auto* d = std::get_if<double>(&v)) {
        row.push_back(*d);
      } else {
        row.push_back(std::get<std::string>(v));
      }
    }
    rows.push_back(std::move(row));
  }
  json repl = json::array();
  for (const auto& r : replacements) {
    repl.push_back({{"column", r.column.qualified()}, {"value", r.value}, {"method", to_string(r.method)}});
  }
  return json{{"database_id", database_id},
              {"query", query},
              {"normalized_query", normalized_query},
              {"candidate_sql", candidate_sql},
              {"sql", sql},
              {"explanation", explanation.to_json()},
              {"result_id", result_id},
              {"result", {{"columns", columns}, {"rows", rows}, {"row_count", result.row_count()},
                          {"truncated", result.truncated}}},
              {"visualizations", viz::to_json(visualizations)},
              {"replacements", repl},
              {"warnings", warnings},
              {"from_cache", from_cache},
              {"history_id", history_id}};
}

int http_status_for(const Error& e) {
  std::string_view k = e.kind();
  if (k == "UnknownDatabase" || k == "NotFound") return 404;
  if (k == "NoTranslation") return 422;
  if (k == "BackendUnavailable") return 503;
  if (k == "ExecutionError" || k == "CycleDetected") return 500;
  return 400;
}

// ---------------------------------------------------------------------------
// Service

struct Service::DatabaseState {
  explicit DatabaseState(OnboardedDatabase db)
      : schema(std::move(db)), values(std::make_shared<SqliteValueSource>(schema.store_path)) {}

  OnboardedDatabase schema;
  std::shared_mutex lock;
  ValueIndexCache values;
};

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw OnboardingError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view content) {
  std::ofstream out(p, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw OnboardingError("cannot write " + p.string());
}

constexpr std::string_view kSqliteMagic{"SQLite format 3\0", 16};

}  // namespace

Service::Service(ServiceOptions options)
    : options_(std::move(options)),
      lexicon_(Lexicon::load(options_.lexicon_dir)),
      history_([&] {
        fs::create_directories(fs::path(options_.data_root) / "databases");
        return std::make_shared<HistoryStore>((fs::path(options_.data_root) / "history.sqlite").string());
      }()),
      translator_(options_.translator, history_) {
  if (!options_.translator) throw InvalidRequest("a translator backend is required");
  load_existing();
}

Service::~Service() = default;

void Service::load_existing() {
  for (const auto& entry : fs::directory_iterator(fs::path(options_.data_root) / "databases")) {
    fs::path schema = entry.path() / "schema.json";
    fs::path store = entry.path() / "store.sqlite";
    if (!fs::exists(schema) || !fs::exists(store)) continue;
    OnboardedDatabase db = schema_from_json(read_file(schema));
    db.store_path = store.string();
    std::string id = db.id;
    databases_[id] = std::make_shared<DatabaseState>(std::move(db));
  }
}

std::string Service::reserve_id(std::string_view filename) {
  std::string stem = clean_identifier(fs::path(std::string(filename)).stem().string());
  if (stem.empty()) stem = "database";
  std::lock_guard lock(mu_);
  for (std::size_t n = 1;; ++n) {
    std::string id = stem + "_" + std::to_string(n);
    if (databases_.count(id)) continue;
    if (fs::create_directory(fs::path(options_.data_root) / "databases" / id)) return id;
  }
}

OnboardedDatabase Service::onboard(std::string_view filename, std::string_view content,
                                   const OnboardingConfig& config) {
  if (content.empty()) throw OnboardingError("the uploaded file is empty");
  const std::string id = reserve_id(filename);
  const fs::path dir = fs::path(options_.data_root) / "databases" / id;
  try {
    std::vector<RawTable> tables;
    if (content.substr(0, kSqliteMagic.size()) == kSqliteMagic) {
      fs::path source = dir / "source.sqlite";
      write_file(source, content);
      tables = load_sqlite_file(source.string());
      fs::remove(source);
    } else {
      tables = load_csv_source(content, fs::path(std::string(filename)).stem().string());
    }
    OnboardingTarget target{id, (dir / "store.sqlite").string(), format_utc(options_.clock())};
    OnboardedDatabase db = onboard_database(tables, config, target);
    write_file(dir / "schema.json", schema_to_json(db));
    std::lock_guard lock(mu_);
    databases_[id] = std::make_shared<DatabaseState>(db);
    return db;
  } catch (...) {
    std::error_code ec;
    fs::remove_all(dir, ec);
    throw;
  }
}

OnboardedDatabase Service::onboard_file(const std::string& path, const OnboardingConfig& config) {
  return onboard(fs::path(path).filename().string(), read_file(path), config);
}

std::shared_ptr<Service::DatabaseState> Service::state(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = databases_.find(id);
  if (it == databases_.end()) throw UnknownDatabase("no database with id '" + id + "'");
  return it->second;
}

std::vector<OnboardedDatabase> Service::list_databases() const {
  std::lock_guard lock(mu_);
  std::vector<OnboardedDatabase> out;
  for (const auto& [_, s] : databases_) out.push_back(s->schema);
  return out;
}

OnboardedDatabase Service::database(const std::string& id) const { return state(id)->schema; }

QueryResponse Service::query(const std::string& database_id, std::string_view text,
                             std::optional<CivilDate> reference) {
  if (text::trim(text).empty()) throw InvalidRequest("the question is empty");
  auto db = state(database_id);
  std::shared_lock read(db->lock);
  const auto now = options_.clock();

  QueryResponse r;
  r.database_id = database_id;
  r.query = std::string(text);
  NormalizedQuery normalized = normalize_query(text, reference.value_or(utc_date(now)));
  r.normalized_query = normalized.normalized;

  CandidateSql candidate = translator_.translate(database_id, normalized, db->schema);
  r.candidate_sql = candidate.sql;
  r.from_cache = candidate.from_cache;

  ResolutionResult resolved = resolve(normalized, candidate.sql, db->schema, db->values, lexicon_);
  r.sql = resolved.sql;
  r.replacements = resolved.replacements;
  r.warnings = resolved.warnings;

  sql::ParsedQuery parsed = sql::parse(r.sql, &db->schema);
  r.explanation = explain(parsed);
  r.result = execute(r.sql, db->schema, options_.executor);
  if (r.result.truncated) {
    r.warnings.push_back("Only the first " + std::to_string(r.result.row_count()) +
                         " rows are shown.");
  }
  r.visualizations = viz::recommend(r.result, options_.ranker);
  r.result_id = store_result(r.result, r.visualizations);

  std::string timestamp = format_utc(now);
  {
    std::lock_guard lock(mu_);
    auto& last = last_timestamp_[database_id];
    if (timestamp < last) timestamp = last;
    last = timestamp;
  }
  r.history_id = history_->append({0, database_id, r.query, r.normalized_query, r.sql,
                                   r.explanation.render(), timestamp, r.warnings});
  return r;
}

std::vector<HistoryEntry> Service::history(const std::string& database_id, std::size_t page) const {
  state(database_id);
  return history_->list(database_id, page, options_.history_page_size);
}

std::string Service::store_result(ResultTable table, std::vector<viz::VisualizationNode> viz) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(results_mu_);
  const auto now = options_.clock();
  for (auto it = results_.begin(); it != results_.end();) {
    it = it->second.expires <= now ? results_.erase(it) : std::next(it);
  }
  std::ostringstream id;
  id << std::hex << rng() << "-" << ++result_counter_;
  results_[id.str()] = {std::move(table), std::move(viz), now + options_.result_ttl};
  return id.str();
}

const Service::StoredResult& Service::find_result_locked(const std::string& id) {
  auto it = results_.find(id);
  if (it == results_.end() || it->second.expires <= options_.clock()) {
    if (it != results_.end()) results_.erase(it);
    throw NotFound("result '" + id + "' does not exist or has expired");
  }
  return it->second;
}

std::string Service::result_csv(const std::string& result_id) {
  std::lock_guard lock(results_mu_);
  return export_csv(find_result_locked(result_id).table);
}

std::vector<viz::VisualizationNode> Service::result_visualizations(const std::string& result_id) {
  std::lock_guard lock(results_mu_);
  return find_result_locked(result_id).visualizations;
}

}  // namespace askdb
