#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

struct sqlite3;
struct sqlite3_stmt;

namespace askdb {

// A single cell as it comes out of (or goes into) the store.
using Value = std::variant<std::monostate, std::int64_t, double, std::string>;

std::string value_to_text(const Value& v);
bool is_null(const Value& v);

}  // namespace askdb

namespace askdb::sqlite {

enum class OpenMode { ReadOnly, ReadWrite, Create };

class Statement;

// Owning handle to one SQLite connection. Errors surface as ExecutionError.
class Database {
 public:
  Database(const std::string& path, OpenMode mode);
  ~Database();
  Database(Database&& other) noexcept;
  Database& operator=(Database&& other) noexcept;
  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;

  void exec(const std::string& sql);
  Statement prepare(std::string_view sql);

  // Restricts the connection to reading: only SELECT, READ and FUNCTION
  // actions are authorized. Applies to every subsequently prepared statement.
  void restrict_to_reads();

  std::int64_t last_insert_rowid() const;
  sqlite3* handle() const noexcept { return db_; }
  const std::string& path() const noexcept { return path_; }

 private:
  sqlite3* db_ = nullptr;
  std::string path_;
};

class Statement {
 public:
  Statement(sqlite3* db, sqlite3_stmt* stmt) : db_(db), stmt_(stmt) {}
  ~Statement();
  Statement(Statement&& other) noexcept;
  Statement& operator=(Statement&& other) noexcept;
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  void bind(int index, const Value& v);
  // Returns true while a row is available.
  bool step();
  void reset();

  int column_count() const;
  std::string column_name(int i) const;
  // Declared type from the table definition; empty for expressions.
  std::string column_decltype(int i) const;
  Value column(int i) const;
  bool readonly() const;

 private:
  sqlite3* db_ = nullptr;
  sqlite3_stmt* stmt_ = nullptr;
};

// Double-quotes an identifier for safe interpolation into SQL text.
std::string quote_identifier(std::string_view name);

}  // namespace askdb::sqlite
