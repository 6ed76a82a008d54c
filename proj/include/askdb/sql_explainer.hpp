#pragma once

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "askdb/sql_parser.hpp"

namespace askdb {

struct Explanation {
  std::string columns;  // "All" for SELECT *
  std::string tables;
  std::optional<std::string> filters;
  std::optional<std::string> grouped_by;
  std::optional<std::string> ordered_by;
  std::optional<std::string> top;

  // Set for UNION / INTERSECT; the fields above then describe the left part.
  struct SetOp {
    std::string op;  // "UNION", "INTERSECT", "UNION ALL", ...
    std::shared_ptr<const Explanation> left;
    std::shared_ptr<const Explanation> right;
  };
  std::optional<SetOp> set_op;

  // e.g. "Column(s): All Table(s): customers, Filtered on: customers.region = 'INDIA'"
  std::string render() const;
  nlohmann::json to_json() const;
};

Explanation explain(const sql::ParsedQuery& parsed);
Explanation explain(const sql::SelectQuery& query);

}  // namespace askdb
