#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

#include "askdb/csv.hpp"
#include "askdb/onboarding.hpp"
#include "askdb/result_table.hpp"

namespace askdb {

struct ExecutorOptions {
  std::size_t row_cap = 10'000;
  // Called with the text of every statement the store actually starts
  // running (SQLite statement trace).
  std::function<void(std::string_view)> statement_observer;
};

// Throws RejectedStatement unless sql is exactly one SELECT statement.
void check_select_only(std::string_view sql);

// Runs one SELECT against a read-only connection to the store. Rows past
// row_cap are dropped and the result is flagged truncated.
ResultTable execute(std::string_view sql, const std::string& store_path,
                    const ExecutorOptions& options = {});
ResultTable execute(std::string_view sql, const OnboardedDatabase& db,
                    const ExecutorOptions& options = {});

// RFC 4180 with CRLF line ends. Nulls are empty fields and empty strings
// are "" so the two survive a round trip.
std::string export_csv(const ResultTable& result);

// Inverse of export_csv given the column types.
ResultTable import_csv(std::string_view csv_text, const std::vector<ResultColumn>& columns);

}  // namespace askdb
