#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "askdb/calendar.hpp"
#include "askdb/sqlite.hpp"

namespace askdb {

enum class DataType { Textual, Numeric, Datetime };

std::string_view to_string(DataType t);
DataType data_type_from_string(std::string_view s);

struct ColumnMeta {
  std::string original_name;
  // Final identifier: cleaned, renamed and synonym-expanded. Matches [a-z0-9_]+.
  std::string cleaned_name;
  std::vector<std::string> synonyms;
  DataType data_type = DataType::Textual;
  // Present iff data_type == Datetime on a source column.
  std::optional<std::string> datetime_format;
  // Set on the five columns materialized from a datetime column.
  std::optional<std::string> derived_from;

  friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

struct TableMeta {
  std::string original_name;
  std::string name;
  std::vector<ColumnMeta> columns;

  const ColumnMeta* find_column(std::string_view name) const;
  friend bool operator==(const TableMeta&, const TableMeta&) = default;
};

// Original identifier -> final identifier. Only identifiers that changed are
// recorded; untouched names map to themselves implicitly.
struct RenameLedger {
  std::map<std::string, std::string> tables;
  // Keyed by final table name, then original column name.
  std::map<std::string, std::map<std::string, std::string>> columns;

  friend bool operator==(const RenameLedger&, const RenameLedger&) = default;
};

struct OnboardedDatabase {
  std::string id;
  std::vector<TableMeta> tables;
  RenameLedger rename_ledger;
  // "table.column" -> derived column names, in materialization order.
  std::map<std::string, std::vector<std::string>> derived_columns;
  std::string created_at;
  // Path of the onboarded SQLite copy. Not part of schema.json.
  std::string store_path;

  // Case-insensitive lookups, matching SQL identifier semantics.
  const TableMeta* find_table(std::string_view name) const;
  const ColumnMeta* find_column(std::string_view table, std::string_view column) const;
};

// Supplied by the person onboarding the database. Keys are original names,
// either "table.column" or a bare "column" (applies to every table that has it).
struct OnboardingConfig {
  // Manual English renames ("PCs" -> "quantity").
  std::map<std::string, std::string> renames;
  std::map<std::string, std::vector<std::string>> synonym_map;
  // Column -> date format pattern, see DateFormat.
  std::map<std::string, std::string> datetime_columns;

  static OnboardingConfig from_json(std::string_view json_text);
  std::string to_json() const;
};

// Tabular data as read from an uploaded file, before any cleaning.
struct RawTable {
  std::string name;
  std::vector<std::string> columns;
  // Declared SQL type per column when the source has one (SQLite); empty otherwise.
  std::vector<std::string> declared_types;
  std::vector<std::vector<Value>> rows;
};

std::string clean_identifier(std::string_view name);

ColumnMeta apply_synonyms(const ColumnMeta& column, const std::vector<std::string>& synonyms,
                          std::span<const ColumnMeta> peer_columns);

struct DerivedColumn {
  ColumnMeta meta;
  std::vector<Value> values;
};

// Emits <col>_day, <col>_month, <col>_year, <col>_month_name_short and
// <col>_month_name_long. Null inputs give nulls; a non-null value that does
// not match the format throws FormatMismatch carrying the row index.
std::vector<DerivedColumn> expand_datetime_column(const ColumnMeta& column,
                                                  const DateFormat& format,
                                                  std::span<const std::optional<std::string>> values);

std::vector<RawTable> load_csv_source(std::string_view content, std::string_view table_name);
std::vector<RawTable> load_csv_file(const std::string& path);
std::vector<RawTable> load_sqlite_file(const std::string& path);
// Dispatches on the file contents: SQLite header magic, otherwise csv.
std::vector<RawTable> load_source_file(const std::string& path);

struct OnboardingTarget {
  std::string id;
  std::string store_path;
  std::string created_at;
};

// Cleans the schema, applies config, materializes datetime expansions and
// writes the queryable copy to target.store_path (which must not exist).
OnboardedDatabase onboard_database(const std::vector<RawTable>& source,
                                   const OnboardingConfig& config,
                                   const OnboardingTarget& target);

std::string schema_to_json(const OnboardedDatabase& db);
OnboardedDatabase schema_from_json(std::string_view json_text);

}  // namespace askdb
