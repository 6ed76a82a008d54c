#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "askdb/onboarding.hpp"
#include "askdb/sqlite.hpp"

namespace askdb {

struct ResultColumn {
  std::string name;
  DataType data_type = DataType::Textual;

  friend bool operator==(const ResultColumn&, const ResultColumn&) = default;
};

struct ResultTable {
  std::vector<ResultColumn> columns;
  std::vector<std::vector<Value>> rows;
  bool truncated = false;

  std::size_t row_count() const { return rows.size(); }
  friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

}  // namespace askdb
