#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "askdb/calendar.hpp"
#include "askdb/error.hpp"
#include "askdb/executor.hpp"
#include "askdb/onboarding.hpp"
#include "askdb/spell.hpp"
#include "askdb/sql_explainer.hpp"
#include "askdb/terminal_resolver.hpp"
#include "askdb/translator.hpp"
#include "askdb/viz_ranker.hpp"

namespace askdb {

using Clock = std::function<std::chrono::system_clock::time_point()>;

// "2026-10-16T09:30:00Z"
std::string format_utc(std::chrono::system_clock::time_point t);
CivilDate utc_date(std::chrono::system_clock::time_point t);
// Accepts "YYYY-MM-DD" optionally followed by a time part; only the date is kept.
CivilDate parse_reference_date(std::string_view text);

struct HistoryEntry {
  std::int64_t id = 0;
  std::string database_id;
  std::string raw_query;
  std::string normalized_query;
  std::string resolved_sql;
  std::string explanation;
  std::string timestamp;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

// Search history and cached translations in one SQLite file.
class HistoryStore : public TranslationStore {
 public:
  explicit HistoryStore(const std::string& path);

  std::int64_t append(HistoryEntry entry);
  // Newest first; page numbers start at 1.
  std::vector<HistoryEntry> list(const std::string& database_id, std::size_t page,
                                 std::size_t page_size) const;

  void save_translation(const CachedTranslation& t) override;
  std::vector<CachedTranslation> load_translations() override;

 private:
  mutable std::mutex mu_;
  std::unique_ptr<sqlite::Database> db_;
};

struct QueryResponse {
  std::string database_id;
  std::string query;
  std::string normalized_query;
  std::string candidate_sql;  // as the translator produced it
  std::string sql;            // after Terminal resolution
  Explanation explanation;
  std::string result_id;
  ResultTable result;
  std::vector<viz::VisualizationNode> visualizations;
  std::vector<Replacement> replacements;
  std::vector<std::string> warnings;
  bool from_cache = false;
  std::int64_t history_id = 0;

  nlohmann::json to_json() const;
};

struct ServiceOptions {
  std::string data_root;
  std::shared_ptr<Translator> translator;
  Clock clock = [] { return std::chrono::system_clock::now(); };
  std::string lexicon_dir = default_data_dir();
  viz::RankerOptions ranker;
  ExecutorOptions executor;
  std::chrono::seconds result_ttl = std::chrono::hours(1);
  std::size_t history_page_size = 20;
};

// Onboarded databases live under <data_root>/databases/<id>/ as
// store.sqlite plus schema.json; history lives in <data_root>/history.sqlite.
// Existing databases are picked up on construction.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();

  // content is CSV text or a SQLite file image; filename supplies the id stem
  // and, for CSV, the table name.
  OnboardedDatabase onboard(std::string_view filename, std::string_view content,
                            const OnboardingConfig& config);
  OnboardedDatabase onboard_file(const std::string& path, const OnboardingConfig& config);

  std::vector<OnboardedDatabase> list_databases() const;
  OnboardedDatabase database(const std::string& id) const;

  QueryResponse query(const std::string& database_id, std::string_view text,
                      std::optional<CivilDate> reference = std::nullopt);

  std::vector<HistoryEntry> history(const std::string& database_id, std::size_t page) const;

  std::string result_csv(const std::string& result_id);
  std::vector<viz::VisualizationNode> result_visualizations(const std::string& result_id);

  std::size_t translator_cache_size() const { return translator_.size(); }

 private:
  struct DatabaseState;
  struct StoredResult {
    ResultTable table;
    std::vector<viz::VisualizationNode> visualizations;
    std::chrono::system_clock::time_point expires;
  };

  std::shared_ptr<DatabaseState> state(const std::string& id) const;
  void load_existing();
  std::string reserve_id(std::string_view filename);
  std::string store_result(ResultTable table, std::vector<viz::VisualizationNode> viz);
  const StoredResult& find_result_locked(const std::string& id);

  ServiceOptions options_;
  Lexicon lexicon_;
  std::shared_ptr<HistoryStore> history_;
  CachedTranslator translator_;

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<DatabaseState>> databases_;
  std::map<std::string, std::string> last_timestamp_;

  std::mutex results_mu_;
  std::map<std::string, StoredResult> results_;
  std::uint64_t result_counter_ = 0;
};

// HTTP status for an error kind: 404, 400, 422, 503 or 500.
int http_status_for(const Error& e);

}  // namespace askdb
