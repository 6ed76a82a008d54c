#include "askdb/sql_explainer.hpp"

#include <algorithm>
#include <variant>

#include "askdb/text.hpp"

namespace askdb {
namespace {

std::string describe(const sql::Expr& e) {
  if (const auto* c = std::get_if<sql::ColumnRef>(&e)) return c->qualified();
  const auto& a = std::get<sql::Aggregate>(e);
  std::string out = text::to_upper(std::string(sql::to_string(a.fn))) + "(";
  if (a.distinct) out += "DISTINCT ";
  out += a.arg ? a.arg->qualified() : "*";
  return out + ")";
}

std::string describe(const sql::Condition& c) {
  std::string value;
  if (const auto* lit = std::get_if<sql::Literal>(&c.value)) {
    value = lit->text;
  } else {
    value = std::get<sql::ColumnRef>(c.value).qualified();
  }
  return c.column.qualified() + " " + text::to_upper(c.op) + " " + value;
}

}  // namespace

Explanation explain(const sql::SelectQuery& q) {
  Explanation e;

  std::vector<std::string> columns;
  for (const auto& item : q.select_items) {
    std::string col = item.star ? "All" : describe(item.expr);
    if (item.alias) col += " AS " + *item.alias;
    columns.push_back(std::move(col));
  }
  e.columns = text::join(columns, ", ");
  if (q.distinct) e.columns += " (distinct)";

  std::vector<std::string> tables;
  for (auto& t : q.tables()) {
    if (std::find(tables.begin(), tables.end(), t) == tables.end()) tables.push_back(t);
  }
  e.tables = text::join(tables, ", ");

  if (!q.where_conditions.empty()) {
    std::string f;
    for (const auto& c : q.where_conditions) {
      if (c.connective == sql::Connective::And) f += " AND ";
      if (c.connective == sql::Connective::Or) f += " OR ";
      f += describe(c);
    }
    e.filters = f;
  }
  if (!q.group_by.empty()) {
    std::vector<std::string> g;
    for (const auto& x : q.group_by) g.push_back(describe(x));
    e.grouped_by = text::join(g, ", ");
  }
  if (!q.order_by.empty()) {
    std::vector<std::string> o;
    for (const auto& x : q.order_by) {
      std::string s = describe(x.expr);
      if (x.descending) s += *x.descending ? " DESC" : " ASC";
      o.push_back(std::move(s));
    }
    e.ordered_by = text::join(o, ", ");
  }
  if (q.limit) e.top = std::to_string(*q.limit);
  return e;
}

Explanation explain(const sql::ParsedQuery& parsed) {
  if (!parsed.set_op || !parsed.right) return explain(parsed.left);
  auto left = std::make_shared<const Explanation>(explain(parsed.left));
  auto right = std::make_shared<const Explanation>(explain(*parsed.right));
  Explanation e = *left;
  std::string op(sql::to_string(*parsed.set_op));
  if (parsed.set_all) op += " ALL";
  e.set_op = Explanation::SetOp{text::to_upper(op), left, right};
  return e;
}

std::string Explanation::render() const {
  if (set_op) return set_op->left->render() + " " + set_op->op + " " + set_op->right->render();
  std::string out = "Column(s): " + columns + " Table(s): " + tables;
  if (filters) out += ", Filtered on: " + *filters;
  if (grouped_by) out += ", Grouped by: " + *grouped_by;
  if (ordered_by) out += ", Ordered by: " + *ordered_by;
  if (top) out += ", Top: " + *top;
  return out;
}

nlohmann::json Explanation::to_json() const {
  nlohmann::json j;
  j["text"] = render();
  if (set_op) {
    j["set_op"] = set_op->op;
    j["parts"] = nlohmann::json::array({set_op->left->to_json(), set_op->right->to_json()});
    return j;
  }
  j["columns"] = columns;
  j["tables"] = tables;
  auto opt = [&](const char* key, const std::optional<std::string>& v) {
    if (v) j[key] = *v;
  };
  opt("filters", filters);
  opt("grouped_by", grouped_by);
  opt("ordered_by", ordered_by);
  opt("top", top);
  return j;
}

}  // namespace askdb
