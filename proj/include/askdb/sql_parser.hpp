#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace askdb {

struct OnboardedDatabase;

namespace sql {

enum class TokenKind {
  DML,  // statement verbs: SELECT, INSERT, DROP, PRAGMA, ...
  Keyword,
  Identifier,
  Operator,
  Literal,
  Whitespace,  // includes comments
  Punctuation,
  Where,
  SetOp,
};

std::string_view to_string(TokenKind k);

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t position;

  friend bool operator==(const Token&, const Token&) = default;
};

// Lossless: concatenating token texts reproduces the input. Keywords are
// matched case-insensitively; quoted literals keep their quotes.
// Throws UnterminatedLiteral for an unclosed string or quoted identifier.
std::vector<Token> tokenize(std::string_view sql);

// The placeholder literal emitted by the translator for unknown cell values.
inline constexpr std::string_view kTerminal = "'Terminal'";

struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct ColumnRef {
  std::string qualifier;  // as written (quotes removed), may be empty
  std::string column;
  std::string table;      // resolved table name; empty if unresolvable without a schema

  // table.column when the table is known, else the bare column.
  std::string qualified() const;
  friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

enum class AggregateFn { Count, Sum, Avg, Min, Max };
std::string_view to_string(AggregateFn f);

struct Aggregate {
  AggregateFn fn = AggregateFn::Count;
  bool distinct = false;
  std::optional<ColumnRef> arg;  // empty means '*'

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

using Expr = std::variant<ColumnRef, Aggregate>;

struct SelectItem {
  bool star = false;
  Expr expr;
  std::optional<std::string> alias;

  friend bool operator==(const SelectItem&, const SelectItem&) = default;
};

struct Literal {
  std::string text;  // as written, quotes included for strings
  bool is_string = false;
  SourceSpan span;   // location in the parsed text; ignored by ==

  bool is_terminal() const { return text == kTerminal; }
  friend bool operator==(const Literal& a, const Literal& b) {
    return a.text == b.text && a.is_string == b.is_string;
  }
};

using Operand = std::variant<Literal, ColumnRef>;

enum class Connective { None, And, Or };

struct Condition {
  Connective connective = Connective::None;  // joins this condition to the previous one
  ColumnRef column;
  std::string op;  // =, !=, <>, <, <=, >, >=, LIKE
  Operand value;

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct TableRef {
  std::string name;      // as written, quotes removed
  std::string alias;
  std::string resolved;  // canonical schema name, or name without a schema

  friend bool operator==(const TableRef&, const TableRef&) = default;
};

struct Join {
  std::string join_type;  // "JOIN", "INNER JOIN", "LEFT JOIN", "LEFT OUTER JOIN", "CROSS JOIN", ","
  TableRef table;
  std::vector<Condition> on;

  friend bool operator==(const Join&, const Join&) = default;
};

struct OrderItem {
  Expr expr;
  std::optional<bool> descending;  // empty when no ASC/DESC was written

  friend bool operator==(const OrderItem&, const OrderItem&) = default;
};

struct SelectQuery {
  bool distinct = false;
  std::vector<SelectItem> select_items;
  TableRef from;
  std::vector<Join> joins;
  std::vector<Condition> where_conditions;
  std::vector<Expr> group_by;
  std::vector<OrderItem> order_by;
  std::optional<std::int64_t> limit;

  // Resolved names from FROM and JOIN, in order.
  std::vector<std::string> tables() const;
  friend bool operator==(const SelectQuery&, const SelectQuery&) = default;
};

enum class SetOpKind { Union, Intersect };
std::string_view to_string(SetOpKind k);

struct ParsedQuery {
  SelectQuery left;
  std::optional<SetOpKind> set_op;
  bool set_all = false;
  std::optional<SelectQuery> right;  // engaged iff set_op

  std::vector<std::string> tables() const;
  friend bool operator==(const ParsedQuery&, const ParsedQuery&) = default;
};

// Parses the supported SELECT subset. With a schema, table names and
// unqualified columns are resolved against it (UnknownIdentifier on
// failure). Anything outside the subset throws UnsupportedSyntax naming the
// construct.
ParsedQuery parse(std::string_view sql, const OnboardedDatabase* schema = nullptr);

// Canonical SQL text for a parsed query; parse(render(q)) == q.
std::string render(const ParsedQuery& q);
std::string render(const Expr& e);
std::string render(const ColumnRef& c);
std::string render(const Condition& c);

struct TerminalRef {
  std::size_t condition_index;  // position among all WHERE conditions, left part first
  ColumnRef column;
  SourceSpan span;              // the 'Terminal' literal in the parsed text
};

// Every WHERE condition whose literal is 'Terminal', in textual order.
std::vector<TerminalRef> find_terminals(const ParsedQuery& q);

}  // namespace sql
}  // namespace askdb
