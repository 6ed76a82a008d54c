#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace askdb::csv {

// A missing value is an unquoted empty field; an empty string is written as "".
using Field = std::optional<std::string>;
using Row = std::vector<Field>;

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;
};

// RFC 4180 reader. Accepts CRLF or LF record separators and an optional UTF-8
// BOM. Every record must have as many fields as the header.
Table parse(std::string_view input);

// RFC 4180 writer: CRLF separators, header first, fields quoted when they
// contain a comma, quote, CR or LF (or are empty strings).
std::string write(const Table& table);

std::string quote_field(const Field& field);

}  // namespace askdb::csv
