#include "askdb/csv.hpp"

#include "askdb/error.hpp"

namespace askdb::csv {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {
    if (in_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  bool done() const { return pos_ >= in_.size(); }

  // Reads one record; returns false at end of input.
  bool next(Row& out) {
    out.clear();
    if (done()) return false;
    while (true) {
      out.push_back(read_field());
      if (done()) return true;
      char c = in_[pos_];
      if (c == ',') {
        ++pos_;
        if (done()) {
          out.push_back(std::nullopt);
          return true;
        }
        continue;
      }
      if (c == '\r') {
        ++pos_;
        if (!done() && in_[pos_] == '\n') ++pos_;
        return true;
      }
      if (c == '\n') {
        ++pos_;
        return true;
      }
      throw MalformedInput("csv: unexpected character after field on line " +
                           std::to_string(line_));
    }
  }

 private:
  Field read_field() {
    if (!done() && in_[pos_] == '"') {
      ++pos_;
      std::string value;
      while (true) {
        if (done()) {
          throw MalformedInput("csv: unterminated quoted field starting on line " +
                               std::to_string(line_));
        }
        char c = in_[pos_++];
        if (c == '"') {
          if (!done() && in_[pos_] == '"') {
            value.push_back('"');
            ++pos_;
            continue;
          }
          break;
        }
        if (c == '\n') ++line_;
        value.push_back(c);
      }
      return value;
    }
    std::size_t start = pos_;
    while (!done() && in_[pos_] != ',' && in_[pos_] != '\r' && in_[pos_] != '\n') {
      if (in_[pos_] == '"') {
        throw MalformedInput("csv: stray quote in unquoted field on line " +
                             std::to_string(line_));
      }
      ++pos_;
    }
    if (!done() && in_[pos_] == '\n') ++line_;
    if (pos_ == start) return std::nullopt;
    return std::string(in_.substr(start, pos_ - start));
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

bool needs_quotes(const std::string& s) {
  if (s.empty()) return true;
  return s.find_first_of(",\"\r\n") != std::string::npos;
}

}  // namespace

Table parse(std::string_view input) {
  Reader reader(input);
  Table table;
  Row row;
  if (!reader.next(row)) throw MalformedInput("csv: missing header row");
  for (auto& f : row) {
    if (!f) throw MalformedInput("csv: empty header name");
    table.header.push_back(*f);
  }
  std::size_t record = 1;
  while (reader.next(row)) {
    ++record;
    // A trailing blank line is tolerated, except with a single column where
    // it is a record holding one null.
    if (table.header.size() > 1 && row.size() == 1 && !row[0] && reader.done()) break;
    if (row.size() != table.header.size()) {
      throw MalformedInput("csv: record " + std::to_string(record) + " has " +
                           std::to_string(row.size()) + " fields, expected " +
                           std::to_string(table.header.size()));
    }
    table.rows.push_back(row);
  }
  return table;
}

std::string quote_field(const Field& field) {
  if (!field) return {};
  if (!needs_quotes(*field)) return *field;
  std::string out = "\"";
  for (char c : *field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string write(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out.push_back(',');
    out += quote_field(table.header[i]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      out += quote_field(row[i]);
    }
    out += "\r\n";
  }
  return out;
}

}  // namespace askdb::csv
