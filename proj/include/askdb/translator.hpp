#pragma once

#include <chrono>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "askdb/datetime_normalizer.hpp"
#include "askdb/onboarding.hpp"

namespace askdb {

struct CandidateSql {
  std::string sql;
  std::string backend_id;
  bool from_cache = false;
};

class Translator {
 public:
  virtual ~Translator() = default;
  // Throws BackendUnavailable or NoTranslation.
  virtual CandidateSql translate(const NormalizedQuery& query, const OnboardedDatabase& schema) = 0;
};

// Deterministic lookup from normalized query text to SQL.
class FixtureTranslator : public Translator {
 public:
  struct Entry {
    std::string pattern;
    std::string sql;
  };

  explicit FixtureTranslator(std::vector<Entry> entries);
  // JSON array of {"pattern", "sql"}.
  static FixtureTranslator load(const std::string& path);

  CandidateSql translate(const NormalizedQuery& query, const OnboardedDatabase& schema) override;

 private:
  std::map<std::string, std::string> by_pattern_;
};

// {"tables": [{"name", "columns": [{"name", "type"}]}]}
nlohmann::json schema_for_backend(const OnboardedDatabase& schema);

// POSTs {"query", "schema"} to <base_url>/translate and expects {"sql"}.
class RemoteTranslator : public Translator {
 public:
  explicit RemoteTranslator(std::string base_url,
                            std::chrono::milliseconds timeout = std::chrono::seconds(10));

  CandidateSql translate(const NormalizedQuery& query, const OnboardedDatabase& schema) override;

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

struct CachedTranslation {
  std::string database_id;
  std::string normalized_query;
  std::string sql;
  std::string backend_id;
};

// Where the cache writes through to; also replayed at startup.
class TranslationStore {
 public:
  virtual ~TranslationStore() = default;
  virtual void save_translation(const CachedTranslation& t) = 0;
  virtual std::vector<CachedTranslation> load_translations() = 0;
};

// Caches successful translations per (database id, normalized text). Each
// distinct key reaches the inner translator at most once while it succeeds;
// concurrent callers for the same key wait for the single in-flight call.
// Failures are not cached.
class CachedTranslator {
 public:
  explicit CachedTranslator(std::shared_ptr<Translator> inner,
                            std::shared_ptr<TranslationStore> store = nullptr);

  CandidateSql translate(const std::string& database_id, const NormalizedQuery& query,
                         const OnboardedDatabase& schema);

  std::size_t size() const;

 private:
  using Key = std::pair<std::string, std::string>;

  std::shared_ptr<Translator> inner_;
  std::shared_ptr<TranslationStore> store_;
  mutable std::mutex mu_;
  std::map<Key, std::shared_future<CandidateSql>> entries_;
};

}  // namespace askdb
