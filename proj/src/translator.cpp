#include "askdb/translator.hpp"

#include <httplib.h>

#include <fstream>

#include "askdb/error.hpp"
#include "askdb/sql_parser.hpp"
#include "askdb/text.hpp"

namespace askdb {

using nlohmann::json;

namespace {

std::string fixture_key(std::string_view text) { return std::string(text::trim(text)); }

// The backend contract: non-empty SQL that tokenizes.
void check_candidate(const std::string& sql, std::string_view backend) {
  if (text::trim(sql).empty()) throw NoTranslation(std::string(backend) + " backend returned empty SQL");
  try {
    sql::tokenize(sql);
  } catch (const Error& e) {
    throw NoTranslation(std::string(backend) + " backend returned malformed SQL: " + e.what());
  }
}

}  // namespace

FixtureTranslator::FixtureTranslator(std::vector<Entry> entries) {
  for (auto& e : entries) by_pattern_[fixture_key(e.pattern)] = std::move(e.sql);
}

FixtureTranslator FixtureTranslator::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open fixture file " + path);
  std::vector<Entry> entries;
  try {
    for (const auto& e : json::parse(in)) {
      entries.push_back({e.at("pattern").get<std::string>(), e.at("sql").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw MalformedInput(path + ": " + e.what());
  }
  return FixtureTranslator(std::move(entries));
}

CandidateSql FixtureTranslator::translate(const NormalizedQuery& query, const OnboardedDatabase&) {
  auto it = by_pattern_.find(fixture_key(query.normalized));
  if (it == by_pattern_.end()) {
    throw NoTranslation("no translation for this question; please check the query again");
  }
  check_candidate(it->second, "fixture");
  return {it->second, "fixture", false};
}

json schema_for_backend(const OnboardedDatabase& schema) {
  json tables = json::array();
  for (const auto& t : schema.tables) {
    json cols = json::array();
    for (const auto& c : t.columns) {
      cols.push_back({{"name", c.cleaned_name}, {"type", to_string(c.data_type)}});
    }
    tables.push_back({{"name", t.name}, {"columns", cols}});
  }
  return json{{"tables", tables}};
}

RemoteTranslator::RemoteTranslator(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {}

CandidateSql RemoteTranslator::translate(const NormalizedQuery& query, const OnboardedDatabase& schema) {
  httplib::Client client(base_url_);
  if (!client.is_valid()) throw BackendUnavailable("invalid backend url " + base_url_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  json body{{"query", query.normalized}, {"schema", schema_for_backend(schema)}};
  auto res = client.Post("/translate", body.dump(), "application/json");
  if (!res) {
    throw BackendUnavailable("translation backend unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status == 404 || res->status == 422) {
    throw NoTranslation("the backend could not translate this question; please check the query again");
  }
  if (res->status != 200) {
    throw BackendUnavailable("translation backend answered HTTP " + std::to_string(res->status));
  }
  std::string sql;
  try {
    sql = json::parse(res->body).at("sql").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendUnavailable(std::string("unreadable backend response: ") + e.what());
  }
  check_candidate(sql, "remote");
  return {sql, "remote", false};
}

CachedTranslator::CachedTranslator(std::shared_ptr<Translator> inner,
                                   std::shared_ptr<TranslationStore> store)
    : inner_(std::move(inner)), store_(std::move(store)) {
  if (!store_) return;
  for (auto& t : store_->load_translations()) {
    std::promise<CandidateSql> p;
    p.set_value({t.sql, t.backend_id, false});
    entries_[{t.database_id, t.normalized_query}] = p.get_future().share();
  }
}

std::size_t CachedTranslator::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

CandidateSql CachedTranslator::translate(const std::string& database_id, const NormalizedQuery& query,
                                         const OnboardedDatabase& schema) {
  Key key{database_id, query.normalized};
  std::promise<CandidateSql> promise;
  std::shared_future<CandidateSql> existing;
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      existing = it->second;
    } else {
      entries_.emplace(key, promise.get_future().share());
    }
  }
  if (existing.valid()) {
    CandidateSql hit = existing.get();
    hit.from_cache = true;
    return hit;
  }
  CandidateSql fresh;
  try {
    fresh = inner_->translate(query, schema);
    fresh.from_cache = false;
  } catch (...) {
    {
      std::lock_guard lock(mu_);
      entries_.erase(key);
    }
    promise.set_exception(std::current_exception());
    throw;
  }
  promise.set_value(fresh);
  if (store_) store_->save_translation({database_id, query.normalized, fresh.sql, fresh.backend_id});
  return fresh;
}

}  // namespace askdb
