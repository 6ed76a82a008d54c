#pragma once

#include <future>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "askdb/datetime_normalizer.hpp"
#include "askdb/onboarding.hpp"
#include "askdb/spell.hpp"
#include "askdb/sql_parser.hpp"

namespace askdb {

enum class ResolutionMethod { Exact, SpellCorrected, Bigram, NumericOrder, Datetime };
std::string_view to_string(ResolutionMethod m);

struct Replacement {
  sql::ColumnRef column;
  std::string value;  // the inserted value, unquoted
  ResolutionMethod method;
};

struct ResolutionResult {
  std::string sql;
  std::vector<Replacement> replacements;
  std::vector<std::string> warnings;
  std::size_t unresolved = 0;

  bool complete() const { return unresolved == 0; }
};

// Distinct values of one column plus their cleaned forms (lowercase,
// punctuation replaced by single spaces), aligned 1:1.
struct ValueIndex {
  std::string table;
  std::string column;
  std::vector<std::string> values;
  std::vector<std::string> cleaned;
  WordIndex tokens;
  std::map<std::string, std::vector<std::size_t>> by_cleaned;

  static ValueIndex build(std::string table, std::string column, std::vector<std::string> values);
};

class ValueSource {
 public:
  virtual ~ValueSource() = default;
  virtual std::vector<std::string> distinct_values(const std::string& table,
                                                   const std::string& column) = 0;
};

// Reads distinct values straight from an onboarded SQLite copy.
class SqliteValueSource : public ValueSource {
 public:
  explicit SqliteValueSource(std::string store_path) : path_(std::move(store_path)) {}
  std::vector<std::string> distinct_values(const std::string& table,
                                           const std::string& column) override;

 private:
  std::string path_;
};

// Lazily built, shared value indexes. Construction is single-flight per
// column; least-recently-used indexes are dropped once the total number of
// cached values exceeds max_values.
class ValueIndexCache {
 public:
  explicit ValueIndexCache(std::shared_ptr<ValueSource> source, std::size_t max_values = 1'000'000);

  std::shared_ptr<const ValueIndex> get(const std::string& table, const std::string& column);
  std::size_t builds() const;

 private:
  using Key = std::pair<std::string, std::string>;
  struct Entry {
    std::shared_future<std::shared_ptr<const ValueIndex>> future;
    std::size_t size = 0;
    std::list<Key>::iterator lru;
  };
  void evict_locked(const Key& keep);

  std::shared_ptr<ValueSource> source_;
  std::size_t max_values_;
  mutable std::mutex mu_;
  std::map<Key, Entry> entries_;
  std::list<Key> lru_;
  std::size_t cached_values_ = 0;
  std::size_t builds_ = 0;
};

struct TextualMatch {
  std::string value;
  ResolutionMethod method;
};

struct TextualOutcome {
  std::optional<TextualMatch> match;
  // Set when several distinct values matched equally well.
  std::vector<std::string> ambiguous;
  std::vector<Correction> corrections;
};

// Cleans the query, spell-corrects its tokens against the wordlist and the
// column's value tokens, forms unigrams and bigrams and looks them up among
// the cleaned values. The longest matching gram wins.
TextualOutcome resolve_textual(std::string_view query, const ValueIndex& index,
                               const Lexicon& lexicon);

// Number words become digits first; the i-th numeral in the query is assigned
// to the i-th numeric placeholder. Missing numerals give nullopt.
std::vector<std::optional<std::string>> resolve_numeric(std::string_view query,
                                                        std::size_t terminal_count);

// yyyymmdd for each datetime placeholder, taken from the temporal
// substitutions in textual order. A span without a day uses the first day of
// its month (or year).
std::vector<std::optional<std::string>> resolve_datetime(
    const std::vector<Substitution>& substitutions, std::size_t terminal_count);

// Replaces every 'Terminal' literal in candidate_sql, dispatching on the data
// type of the column each one is compared against. Nothing else in the SQL
// text changes. Unresolved placeholders stay in place and each adds one warning.
ResolutionResult resolve(const NormalizedQuery& query, std::string_view candidate_sql,
                         const OnboardedDatabase& schema, ValueIndexCache& values,
                         const Lexicon& lexicon);

std::string sql_string_literal(std::string_view value);

}  // namespace askdb
