#include "askdb/executor.hpp"

#include <sqlite3.h>

#include <charconv>
#include <cmath>

#include "askdb/error.hpp"
#include "askdb/sql_parser.hpp"
#include "askdb/sqlite.hpp"
#include "askdb/text.hpp"

namespace askdb {

void check_select_only(std::string_view sql) {
  std::vector<sql::Token> tokens;
  try {
    tokens = sql::tokenize(sql);
  } catch (const Error& e) {
    throw RejectedStatement(std::string("statement does not tokenize: ") + e.what());
  }
  bool seen_select = false;
  bool ended = false;
  for (const auto& t : tokens) {
    if (t.kind == sql::TokenKind::Whitespace) continue;
    if (ended) throw RejectedStatement("only a single statement may be executed");
    if (t.kind == sql::TokenKind::Punctuation && t.text == ";") {
      ended = true;
      continue;
    }
    if (!seen_select) {
      if (t.kind != sql::TokenKind::DML || !text::iequals(t.text, "SELECT")) {
        throw RejectedStatement("only SELECT statements may be executed, got '" + t.text + "'");
      }
      seen_select = true;
      continue;
    }
    if (t.kind == sql::TokenKind::DML && !text::iequals(t.text, "SELECT")) {
      throw RejectedStatement("statement contains '" + t.text + "'");
    }
  }
  if (!seen_select) throw RejectedStatement("empty statement");
}

namespace {

DataType type_from_decl(const std::string& decl) {
  std::string d = text::to_upper(decl);
  if (d.find("DATE") != std::string::npos || d.find("TIME") != std::string::npos) {
    return DataType::Datetime;
  }
  for (const char* n : {"INT", "REAL", "FLOA", "DOUB", "NUM", "DEC"}) {
    if (d.find(n) != std::string::npos) return DataType::Numeric;
  }
  return DataType::Textual;
}

int trace_callback(unsigned type, void* ctx, void* p, void*) {
  if (type != SQLITE_TRACE_STMT) return 0;
  auto* observer = static_cast<const std::function<void(std::string_view)>*>(ctx);
  const char* sql = sqlite3_sql(static_cast<sqlite3_stmt*>(p));
  if (sql) (*observer)(sql);
  return 0;
}

}  // namespace

ResultTable execute(std::string_view sql, const std::string& store_path,
                    const ExecutorOptions& options) {
  check_select_only(sql);
  sqlite::Database db(store_path, sqlite::OpenMode::ReadOnly);
  db.restrict_to_reads();
  if (options.statement_observer) {
    sqlite3_trace_v2(db.handle(), SQLITE_TRACE_STMT, &trace_callback,
                     const_cast<std::function<void(std::string_view)>*>(&options.statement_observer));
  }

  std::optional<sqlite::Statement> stmt;
  try {
    stmt.emplace(db.prepare(sql));
  } catch (const ExecutionError& e) {
    if (std::string_view(e.what()).find("not authorized") != std::string_view::npos) {
      throw RejectedStatement(e.what());
    }
    throw;
  }
  if (!stmt->readonly()) throw RejectedStatement("statement would modify the store");

  ResultTable result;
  const int n = stmt->column_count();
  std::vector<bool> declared(n, false);
  for (int i = 0; i < n; ++i) {
    std::string decl = stmt->column_decltype(i);
    declared[i] = !decl.empty();
    result.columns.push_back({stmt->column_name(i), type_from_decl(decl)});
  }
  while (stmt->step()) {
    if (result.rows.size() >= options.row_cap) {
      result.truncated = true;
      break;
    }
    std::vector<Value> row;
    row.reserve(n);
    for (int i = 0; i < n; ++i) row.push_back(stmt->column(i));
    result.rows.push_back(std::move(row));
  }

  for (int i = 0; i < n; ++i) {
    auto& col = result.columns[i];
    if (!declared[i]) {
      // Expressions carry no declared type: numeric when every value is.
      bool any = false, numeric = true;
      for (const auto& row : result.rows) {
        if (is_null(row[i])) continue;
        any = true;
        numeric = numeric && !std::holds_alternative<std::string>(row[i]);
      }
      col.data_type = any && numeric ? DataType::Numeric : DataType::Textual;
    }
    if (col.data_type != DataType::Numeric) {
      for (auto& row : result.rows) {
        if (!is_null(row[i]) && !std::holds_alternative<std::string>(row[i])) {
          row[i] = value_to_text(row[i]);
        }
      }
    }
  }
  return result;
}

ResultTable execute(std::string_view sql, const OnboardedDatabase& db,
                    const ExecutorOptions& options) {
  return execute(sql, db.store_path, options);
}

namespace {

// Doubles always carry a '.', exponent or non-finite marker so they read
// back as doubles rather than integers.
std::string csv_text(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    std::string s = value_to_text(v);
    if (std::isfinite(*d) && s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
  }
  return value_to_text(v);
}

Value numeric_value(const std::string& s) {
  std::int64_t i = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (ec == std::errc() && p == s.data() + s.size()) return i;
  double d = 0;
  auto [q, ec2] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec2 == std::errc() && q == s.data() + s.size()) return d;
  return s;
}

}  // namespace

std::string export_csv(const ResultTable& result) {
  csv::Table t;
  for (const auto& c : result.columns) t.header.push_back(c.name);
  for (const auto& row : result.rows) {
    csv::Row r;
    for (const auto& v : row) {
      r.push_back(is_null(v) ? csv::Field{} : csv::Field{csv_text(v)});
    }
    t.rows.push_back(std::move(r));
  }
  return csv::write(t);
}

ResultTable import_csv(std::string_view csv_text, const std::vector<ResultColumn>& columns) {
  csv::Table t = csv::parse(csv_text);
  if (t.header.size() != columns.size()) {
    throw MalformedInput("csv has " + std::to_string(t.header.size()) + " columns, expected " +
                         std::to_string(columns.size()));
  }
  ResultTable out;
  out.columns = columns;
  for (const auto& r : t.rows) {
    std::vector<Value> row;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!r[i]) {
        row.emplace_back(std::monostate{});
      } else if (columns[i].data_type == DataType::Numeric) {
        row.push_back(numeric_value(*r[i]));
      } else {
        row.emplace_back(*r[i]);
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace askdb
