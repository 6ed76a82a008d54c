#include "askdb/sql_parser.hpp"

#include <algorithm>
#include <array>
#include <charconv>

#include "askdb/error.hpp"
#include "askdb/onboarding.hpp"
#include "askdb/text.hpp"

namespace askdb::sql {

std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::DML:
      return "DML";
    case TokenKind::Keyword:
      return "Keyword";
    case TokenKind::Identifier:
      return "Identifier";
    case TokenKind::Operator:
      return "Operator";
    case TokenKind::Literal:
      return "Literal";
    case TokenKind::Whitespace:
      return "Whitespace";
    case TokenKind::Punctuation:
      return "Punctuation";
    case TokenKind::Where:
      return "Where";
    case TokenKind::SetOp:
      return "SetOp";
  }
  return "Identifier";
}

std::string_view to_string(AggregateFn f) {
  switch (f) {
    case AggregateFn::Count:
      return "COUNT";
    case AggregateFn::Sum:
      return "SUM";
    case AggregateFn::Avg:
      return "AVG";
    case AggregateFn::Min:
      return "MIN";
    case AggregateFn::Max:
      return "MAX";
  }
  return "COUNT";
}

std::string_view to_string(SetOpKind k) { return k == SetOpKind::Union ? "UNION" : "INTERSECT"; }

std::string ColumnRef::qualified() const { return table.empty() ? column : table + "." + column; }

std::vector<std::string> SelectQuery::tables() const {
  std::vector<std::string> out{from.resolved};
  for (const auto& j : joins) out.push_back(j.table.resolved);
  return out;
}

std::vector<std::string> ParsedQuery::tables() const {
  auto out = left.tables();
  if (right) {
    for (auto& t : right->tables()) out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

constexpr std::array kDml = {"SELECT", "INSERT",  "UPDATE",  "DELETE", "MERGE",   "REPLACE",
                             "UPSERT", "CREATE",  "DROP",    "ALTER",  "TRUNCATE", "PRAGMA",
                             "ATTACH", "DETACH",  "VACUUM",  "REINDEX", "ANALYZE", "GRANT",
                             "REVOKE", "BEGIN",   "COMMIT",  "ROLLBACK", "SAVEPOINT",
                             "RELEASE"};

constexpr std::array kKeywords = {
    "FROM",  "JOIN",     "INNER",  "LEFT",   "RIGHT",  "FULL",   "OUTER",   "CROSS",
    "NATURAL", "ON",     "USING",  "AND",    "OR",     "NOT",    "GROUP",   "BY",
    "ORDER", "HAVING",   "LIMIT",  "OFFSET", "ASC",    "DESC",   "DISTINCT", "ALL",
    "AS",    "LIKE",     "IN",     "BETWEEN", "IS",    "NULL",   "EXISTS",  "CASE",
    "WHEN",  "THEN",     "ELSE",   "END",    "OVER",   "PARTITION", "WITH", "INTO",
    "VALUES", "SET",     "TABLE",  "INDEX",  "VIEW",   "IF",     "WINDOW",  "GLOB",
    "REGEXP", "ESCAPE",  "COLLATE", "RECURSIVE"};

constexpr std::array kSetOps = {"UNION", "INTERSECT", "EXCEPT", "MINUS"};

template <std::size_t N>
bool contains(const std::array<const char*, N>& words, std::string_view upper) {
  return std::any_of(words.begin(), words.end(), [&](const char* w) { return upper == w; });
}

bool ident_start(char c) {
  return text::is_alnum(c) || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}
bool ident_char(char c) { return ident_start(c) || c == '$'; }

TokenKind classify_word(std::string_view word) {
  std::string upper = text::to_upper(word);
  if (upper == "WHERE") return TokenKind::Where;
  if (contains(kSetOps, upper)) return TokenKind::SetOp;
  if (contains(kDml, upper)) return TokenKind::DML;
  if (contains(kKeywords, upper)) return TokenKind::Keyword;
  return TokenKind::Identifier;
}

}  // namespace

std::vector<Token> tokenize(std::string_view sql) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = sql.size();
  auto emit = [&](TokenKind k, std::size_t start, std::size_t end) {
    out.push_back({k, std::string(sql.substr(start, end - start)), start});
  };
  while (i < n) {
    const std::size_t start = i;
    char c = sql[i];
    if (text::is_space(c)) {
      while (i < n && text::is_space(sql[i])) ++i;
      emit(TokenKind::Whitespace, start, i);
    } else if (c == '-' && i + 1 < n && sql[i + 1] == '-') {
      while (i < n && sql[i] != '\n') ++i;
      emit(TokenKind::Whitespace, start, i);
    } else if (c == '/' && i + 1 < n && sql[i + 1] == '*') {
      auto close = sql.find("*/", i + 2);
      if (close == std::string_view::npos) {
        throw UnterminatedLiteral("unterminated comment starting at offset " +
                                  std::to_string(start));
      }
      i = close + 2;
      emit(TokenKind::Whitespace, start, i);
    } else if (c == '\'' || c == '"' || c == '`' || c == '[') {
      const char close = c == '[' ? ']' : c;
      ++i;
      while (true) {
        if (i >= n) {
          throw UnterminatedLiteral(std::string(c == '\'' ? "unterminated string literal"
                                                           : "unterminated quoted identifier") +
                                    " starting at offset " + std::to_string(start));
        }
        if (sql[i] == close) {
          if (close != ']' && i + 1 < n && sql[i + 1] == close) {
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        ++i;
      }
      emit(c == '\'' ? TokenKind::Literal : TokenKind::Identifier, start, i);
    } else if (text::is_digit(c) || (c == '.' && i + 1 < n && text::is_digit(sql[i + 1]))) {
      while (i < n && text::is_digit(sql[i])) ++i;
      if (i < n && sql[i] == '.') {
        ++i;
        while (i < n && text::is_digit(sql[i])) ++i;
      }
      if (i < n && (sql[i] == 'e' || sql[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (sql[j] == '+' || sql[j] == '-')) ++j;
        if (j < n && text::is_digit(sql[j])) {
          i = j;
          while (i < n && text::is_digit(sql[i])) ++i;
        }
      }
      // 1abc is an identifier in most dialects.
      if (i < n && ident_char(sql[i]) && sql[i] != '$') {
        while (i < n && ident_char(sql[i])) ++i;
        emit(TokenKind::Identifier, start, i);
      } else {
        emit(TokenKind::Literal, start, i);
      }
    } else if (ident_start(c)) {
      while (i < n && ident_char(sql[i])) ++i;
      emit(classify_word(sql.substr(start, i - start)), start, i);
    } else {
      static constexpr std::array<std::string_view, 6> kTwoChar = {"<=", ">=", "<>", "!=", "==",
                                                                   "||"};
      std::string_view two = sql.substr(i, 2);
      if (std::find(kTwoChar.begin(), kTwoChar.end(), two) != kTwoChar.end()) {
        i += 2;
        emit(TokenKind::Operator, start, i);
      } else if (std::string_view("=<>+-/%").find(c) != std::string_view::npos) {
        ++i;
        emit(TokenKind::Operator, start, i);
      } else {
        ++i;
        emit(TokenKind::Punctuation, start, i);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

std::string unquote_identifier(std::string_view t) {
  if (t.size() >= 2 && (t.front() == '"' || t.front() == '`' || t.front() == '[')) {
    char close = t.front() == '[' ? ']' : t.front();
    std::string out;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      out.push_back(t[i]);
      if (close != ']' && t[i] == close && i + 2 < t.size() && t[i + 1] == close) ++i;
    }
    return out;
  }
  return std::string(t);
}

std::optional<AggregateFn> aggregate_from_name(std::string_view name) {
  std::string u = text::to_upper(name);
  if (u == "COUNT") return AggregateFn::Count;
  if (u == "SUM") return AggregateFn::Sum;
  if (u == "AVG") return AggregateFn::Avg;
  if (u == "MIN") return AggregateFn::Min;
  if (u == "MAX") return AggregateFn::Max;
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view sql, const OnboardedDatabase* schema) : schema_(schema) {
    for (auto& t : tokenize(sql)) {
      if (t.kind != TokenKind::Whitespace) toks_.push_back(std::move(t));
    }
  }

  ParsedQuery parse_statement() {
    if (toks_.empty()) throw UnsupportedSyntax("empty statement");
    if (!is_word(peek(), "SELECT")) {
      throw UnsupportedSyntax("only SELECT statements are supported, found '" + peek().text + "'");
    }
    ParsedQuery q;
    q.left = parse_select();
    if (peek().kind == TokenKind::SetOp) {
      std::string op = text::to_upper(peek().text);
      if (op != "UNION" && op != "INTERSECT") {
        throw UnsupportedSyntax("set operation " + op + " is not supported");
      }
      advance();
      q.set_op = op == "UNION" ? SetOpKind::Union : SetOpKind::Intersect;
      if (is_word(peek(), "ALL")) {
        q.set_all = true;
        advance();
      }
      if (!is_word(peek(), "SELECT")) expected("SELECT after " + op);
      q.right = parse_select();
      if (peek().kind == TokenKind::SetOp) {
        throw UnsupportedSyntax("only one top-level set operation is supported");
      }
    }
    if (is_punct(peek(), ";")) advance();
    if (!at_end()) {
      if (peek().kind == TokenKind::DML) {
        throw UnsupportedSyntax("multiple statements are not supported");
      }
      throw_unsupported_at(peek());
    }
    return q;
  }

 private:
  struct Scope {
    std::vector<TableRef> tables;
    std::vector<std::string> select_aliases;
  };

  // --- token helpers ---
  const Token& peek(std::size_t ahead = 0) const {
    static const Token kEnd{TokenKind::Whitespace, "", 0};
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : kEnd;
  }
  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& advance() { return toks_.at(pos_++); }
  static bool is_word(const Token& t, std::string_view upper) {
    return (t.kind == TokenKind::Keyword || t.kind == TokenKind::DML ||
            t.kind == TokenKind::Where || t.kind == TokenKind::SetOp ||
            t.kind == TokenKind::Identifier) &&
           text::iequals(t.text, upper);
  }
  static bool is_punct(const Token& t, std::string_view p) {
    return t.kind == TokenKind::Punctuation && t.text == p;
  }
  [[noreturn]] void expected(const std::string& what) const {
    std::string near = at_end() ? "end of input" : "'" + peek().text + "'";
    throw UnsupportedSyntax("expected " + what + " near " + near);
  }
  void expect_word(std::string_view w) {
    if (!is_word(peek(), w)) expected(std::string(w));
    advance();
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(peek(), p)) expected("'" + std::string(p) + "'");
    advance();
  }

  [[noreturn]] void throw_unsupported_at(const Token& t) const {
    std::string u = text::to_upper(t.text);
    if (u == "OVER" || u == "PARTITION" || u == "WINDOW") {
      throw UnsupportedSyntax("window functions (" + u + ") are not supported");
    }
    if (u == "HAVING") throw UnsupportedSyntax("HAVING is not supported");
    if (u == "OFFSET") throw UnsupportedSyntax("OFFSET is not supported");
    if (u == "WITH") throw UnsupportedSyntax("common table expressions (WITH) are not supported");
    if (u == "CASE") throw UnsupportedSyntax("CASE expressions are not supported");
    if (u == "NOT" || u == "IN" || u == "BETWEEN" || u == "IS" || u == "EXISTS") {
      throw UnsupportedSyntax("predicate " + u + " is not supported");
    }
    if (t.kind == TokenKind::SetOp) {
      throw UnsupportedSyntax("set operation " + u + " is not supported here");
    }
    throw UnsupportedSyntax("unsupported syntax near '" + t.text + "'");
  }

  // Identifier name (plain or quoted), not a reserved word.
  std::string take_name(const std::string& what) {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier) {
      if (t.kind == TokenKind::Keyword || t.kind == TokenKind::Where ||
          t.kind == TokenKind::SetOp) {
        throw_unsupported_at(t);
      }
      expected(what);
    }
    advance();
    return unquote_identifier(t.text);
  }

  // --- grammar ---
  SelectQuery parse_select() {
    SelectQuery q;
    expect_word("SELECT");
    if (is_word(peek(), "DISTINCT")) {
      q.distinct = true;
      advance();
    } else if (is_word(peek(), "ALL")) {
      advance();
    }
    // Select items reference tables declared later; parse raw then resolve.
    std::vector<SelectItem> items;
    do {
      items.push_back(parse_select_item());
    } while (is_punct(peek(), ",") && (advance(), true));

    if (!is_word(peek(), "FROM")) {
      if (at_end()) expected("FROM");
      throw_unsupported_at(peek());
    }
    advance();
    Scope scope;
    q.from = parse_table_ref(std::nullopt);
    scope.tables.push_back(q.from);
    while (true) {
      std::string join_type;
      if (is_punct(peek(), ",")) {
        advance();
        join_type = ",";
      } else if (is_word(peek(), "JOIN")) {
        advance();
        join_type = "JOIN";
      } else if (is_word(peek(), "INNER") && is_word(peek(1), "JOIN")) {
        pos_ += 2;
        join_type = "INNER JOIN";
      } else if (is_word(peek(), "CROSS") && is_word(peek(1), "JOIN")) {
        pos_ += 2;
        join_type = "CROSS JOIN";
      } else if (is_word(peek(), "LEFT") && is_word(peek(1), "JOIN")) {
        pos_ += 2;
        join_type = "LEFT JOIN";
      } else if (is_word(peek(), "LEFT") && is_word(peek(1), "OUTER") &&
                 is_word(peek(2), "JOIN")) {
        pos_ += 3;
        join_type = "LEFT OUTER JOIN";
      } else if (is_word(peek(), "RIGHT") || is_word(peek(), "FULL") ||
                 is_word(peek(), "NATURAL")) {
        throw UnsupportedSyntax(text::to_upper(peek().text) + " joins are not supported");
      } else {
        break;
      }
      Join j;
      j.join_type = join_type;
      j.table = parse_table_ref(q.joins.size());
      scope.tables.push_back(j.table);
      q.joins.push_back(std::move(j));
    }
    // ON clauses may reference any table in the join chain (A JOIN B JOIN C ON ...).
    // Re-scan: conditions were deferred until the scope is complete.
    for (auto& pending : pending_on_) {
      for (auto& c : pending.second) resolve_condition(c, scope);
      q.joins.at(pending.first).on = std::move(pending.second);
    }
    pending_on_.clear();

    for (auto& item : items) {
      if (!item.star) resolve_expr(item.expr, scope);
      if (item.alias) scope.select_aliases.push_back(*item.alias);
    }
    q.select_items = std::move(items);

    if (peek().kind == TokenKind::Where) {
      advance();
      q.where_conditions = parse_conditions(scope);
    }
    if (is_word(peek(), "GROUP")) {
      advance();
      expect_word("BY");
      do {
        q.group_by.push_back(parse_expr(scope));
      } while (is_punct(peek(), ",") && (advance(), true));
    }
    if (is_word(peek(), "HAVING")) throw_unsupported_at(peek());
    if (is_word(peek(), "ORDER")) {
      advance();
      expect_word("BY");
      do {
        OrderItem item;
        item.expr = parse_expr(scope);
        if (is_word(peek(), "ASC")) {
          item.descending = false;
          advance();
        } else if (is_word(peek(), "DESC")) {
          item.descending = true;
          advance();
        }
        q.order_by.push_back(std::move(item));
      } while (is_punct(peek(), ",") && (advance(), true));
    }
    if (is_word(peek(), "LIMIT")) {
      advance();
      const Token& t = peek();
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (t.kind != TokenKind::Literal || ec != std::errc() ||
          p != t.text.data() + t.text.size()) {
        expected("integer after LIMIT");
      }
      advance();
      q.limit = v;
      if (is_punct(peek(), ",") || is_word(peek(), "OFFSET")) {
        throw UnsupportedSyntax("OFFSET is not supported");
      }
    }
    return q;
  }

  TableRef parse_table_ref(std::optional<std::size_t> join_index) {
    if (is_punct(peek(), "(")) {
      if (is_word(peek(1), "SELECT")) throw UnsupportedSyntax("nested subqueries are not supported");
      expected("table name");
    }
    TableRef t;
    t.name = take_name("table name");
    if (is_punct(peek(), ".")) throw UnsupportedSyntax("schema-qualified table names are not supported");
    if (is_word(peek(), "AS")) {
      advance();
      t.alias = take_name("table alias");
    } else if (peek().kind == TokenKind::Identifier) {
      t.alias = take_name("table alias");
    }
    if (schema_) {
      const TableMeta* meta = schema_->find_table(t.name);
      if (!meta) throw UnknownIdentifier("unknown table '" + t.name + "'");
      t.resolved = meta->name;
    } else {
      t.resolved = t.name;
    }
    if (is_word(peek(), "ON")) {
      if (!join_index) expected("JOIN before ON");
      advance();
      // Resolved once the full join chain is known.
      Scope none;
      auto conds = parse_conditions(none, /*defer=*/true);
      pending_on_.emplace_back(*join_index, std::move(conds));
    } else if (is_word(peek(), "USING")) {
      throw UnsupportedSyntax("JOIN ... USING is not supported");
    }
    return t;
  }

  SelectItem parse_select_item() {
    SelectItem item;
    if (is_punct(peek(), "*")) {
      advance();
      item.star = true;
      return item;
    }
    item.expr = parse_expr_unresolved();
    if (is_word(peek(), "AS")) {
      advance();
      item.alias = take_name("column alias");
    } else if (peek().kind == TokenKind::Identifier) {
      item.alias = take_name("column alias");
    }
    return item;
  }

  Expr parse_expr(const Scope& scope) {
    Expr e = parse_expr_unresolved();
    resolve_expr(e, scope);
    return e;
  }

  Expr parse_expr_unresolved() {
    const Token& t = peek();
    if (is_punct(t, "(")) {
      if (is_word(peek(1), "SELECT")) throw UnsupportedSyntax("nested subqueries are not supported");
      throw UnsupportedSyntax("parenthesized expressions are not supported");
    }
    if (t.kind == TokenKind::Identifier && is_punct(peek(1), "(")) {
      auto fn = aggregate_from_name(t.text);
      std::string name = text::to_upper(t.text);
      if (!fn) {
        // Scan ahead for OVER so window functions get the precise message.
        std::size_t depth = 0;
        for (std::size_t k = pos_ + 1; k < toks_.size(); ++k) {
          if (is_punct(toks_[k], "(")) ++depth;
          if (is_punct(toks_[k], ")") && --depth == 0) {
            if (k + 1 < toks_.size() && is_word(toks_[k + 1], "OVER")) {
              throw UnsupportedSyntax("window functions (" + name + " ... OVER) are not supported");
            }
            break;
          }
        }
        throw UnsupportedSyntax("function " + name + " is not supported");
      }
      advance();
      advance();
      Aggregate agg;
      agg.fn = *fn;
      if (is_word(peek(), "DISTINCT")) {
        agg.distinct = true;
        advance();
      }
      if (is_punct(peek(), "*")) {
        if (agg.fn != AggregateFn::Count) throw UnsupportedSyntax(name + "(*) is not supported");
        advance();
      } else {
        agg.arg = parse_column_ref();
      }
      expect_punct(")");
      if (is_word(peek(), "OVER")) {
        throw UnsupportedSyntax("window functions (" + name + " ... OVER) are not supported");
      }
      return agg;
    }
    if (t.kind == TokenKind::Identifier) return parse_column_ref();
    if (t.kind == TokenKind::Literal) throw UnsupportedSyntax("constant expressions are not supported");
    if (t.kind == TokenKind::Keyword || t.kind == TokenKind::SetOp || t.kind == TokenKind::Where) {
      throw_unsupported_at(t);
    }
    expected("column or aggregate");
  }

  ColumnRef parse_column_ref() {
    ColumnRef c;
    std::string first = take_name("column name");
    if (is_punct(peek(), ".")) {
      advance();
      if (is_punct(peek(), "*")) throw UnsupportedSyntax("qualified '*' is not supported");
      c.qualifier = first;
      c.column = take_name("column name");
    } else {
      c.column = first;
    }
    if (is_punct(peek(), "(") || is_word(peek(), "OVER")) throw_unsupported_at(peek());
    return c;
  }

  std::vector<Condition> parse_conditions(const Scope& scope, bool defer = false) {
    std::vector<Condition> out;
    Connective conn = Connective::None;
    while (true) {
      Condition c;
      c.connective = conn;
      if (is_punct(peek(), "(")) throw UnsupportedSyntax("parenthesized conditions are not supported");
      if (is_word(peek(), "NOT") || is_word(peek(), "EXISTS")) throw_unsupported_at(peek());
      Expr lhs = parse_expr_unresolved();
      if (!std::holds_alternative<ColumnRef>(lhs)) {
        throw UnsupportedSyntax("aggregate conditions outside HAVING are not supported");
      }
      c.column = std::get<ColumnRef>(lhs);
      const Token& op = peek();
      if (op.kind == TokenKind::Operator &&
          (op.text == "=" || op.text == "!=" || op.text == "<>" || op.text == "<" ||
           op.text == "<=" || op.text == ">" || op.text == ">=" || op.text == "==")) {
        c.op = op.text;
        advance();
      } else if (is_word(op, "LIKE")) {
        c.op = "LIKE";
        advance();
      } else if (is_word(op, "NOT") || is_word(op, "IN") || is_word(op, "BETWEEN") ||
                 is_word(op, "IS")) {
        throw_unsupported_at(op);
      } else {
        expected("comparison operator");
      }
      c.value = parse_operand();
      if (!defer) resolve_condition(c, scope);
      out.push_back(std::move(c));
      if (is_word(peek(), "AND")) {
        conn = Connective::And;
        advance();
      } else if (is_word(peek(), "OR")) {
        conn = Connective::Or;
        advance();
      } else {
        break;
      }
    }
    return out;
  }

  Operand parse_operand() {
    const Token& t = peek();
    if (t.kind == TokenKind::Literal) {
      advance();
      return Literal{t.text, t.text.front() == '\'', {t.position, t.text.size()}};
    }
    if (t.kind == TokenKind::Operator && (t.text == "-" || t.text == "+") &&
        peek(1).kind == TokenKind::Literal && peek(1).text.front() != '\'') {
      const Token& sign = advance();
      const Token& num = advance();
      std::size_t end = num.position + num.text.size();
      return Literal{sign.text + num.text, false, {sign.position, end - sign.position}};
    }
    if (is_punct(t, "(")) {
      if (is_word(peek(1), "SELECT")) throw UnsupportedSyntax("nested subqueries are not supported");
      throw UnsupportedSyntax("parenthesized expressions are not supported");
    }
    if (is_word(t, "NULL")) throw UnsupportedSyntax("NULL comparisons are not supported");
    if (t.kind == TokenKind::Identifier) {
      if (is_punct(peek(1), "(")) {
        throw UnsupportedSyntax("function " + text::to_upper(t.text) + " is not supported");
      }
      return parse_column_ref();
    }
    expected("literal or column");
  }

  void resolve_condition(Condition& c, const Scope& scope) {
    resolve_column(c.column, scope);
    if (auto* col = std::get_if<ColumnRef>(&c.value)) resolve_column(*col, scope);
  }

  void resolve_expr(Expr& e, const Scope& scope) {
    if (auto* c = std::get_if<ColumnRef>(&e)) {
      resolve_column(*c, scope);
    } else if (auto* a = std::get_if<Aggregate>(&e)) {
      if (a->arg) resolve_column(*a->arg, scope);
    }
  }

  void resolve_column(ColumnRef& c, const Scope& scope) {
    if (!c.qualifier.empty()) {
      const TableRef* hit = nullptr;
      for (const auto& t : scope.tables) {
        if ((!t.alias.empty() && text::iequals(t.alias, c.qualifier)) ||
            (t.alias.empty() && text::iequals(t.name, c.qualifier)) ||
            text::iequals(t.resolved, c.qualifier)) {
          hit = &t;
          break;
        }
      }
      if (!hit) {
        if (schema_) {
          throw UnknownIdentifier("table or alias '" + c.qualifier + "' is not in the FROM clause");
        }
        c.table = c.qualifier;
        return;
      }
      c.table = hit->resolved;
      if (schema_ && !schema_->find_column(hit->resolved, c.column)) {
        throw UnknownIdentifier("unknown column '" + c.qualifier + "." + c.column + "'");
      }
      return;
    }
    for (const auto& a : scope.select_aliases) {
      if (text::iequals(a, c.column)) return;
    }
    if (!schema_) {
      if (scope.tables.size() == 1) c.table = scope.tables.front().resolved;
      return;
    }
    std::vector<std::string> owners;
    for (const auto& t : scope.tables) {
      if (schema_->find_column(t.resolved, c.column)) owners.push_back(t.resolved);
    }
    std::sort(owners.begin(), owners.end());
    owners.erase(std::unique(owners.begin(), owners.end()), owners.end());
    if (owners.empty()) throw UnknownIdentifier("unknown column '" + c.column + "'");
    if (owners.size() > 1) {
      throw UnknownIdentifier("ambiguous column '" + c.column + "' (in " +
                              text::join(owners, ", ") + ")");
    }
    c.table = owners.front();
  }

  const OnboardedDatabase* schema_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::pair<std::size_t, std::vector<Condition>>> pending_on_;
};

}  // namespace

ParsedQuery parse(std::string_view sql, const OnboardedDatabase* schema) {
  Parser p(sql, schema);
  return p.parse_statement();
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

bool plain_identifier(std::string_view s) {
  if (s.empty() || !(text::is_alnum(s[0]) || s[0] == '_') || text::is_digit(s[0])) return false;
  for (char c : s) {
    if (!(text::is_alnum(c) || c == '_')) return false;
  }
  return classify_word(s) == TokenKind::Identifier;
}

std::string ident(std::string_view s) {
  if (plain_identifier(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

std::string render_conditions(const std::vector<Condition>& conds) {
  std::string out;
  for (const auto& c : conds) {
    if (c.connective == Connective::And) out += " AND ";
    if (c.connective == Connective::Or) out += " OR ";
    out += render(c);
  }
  return out;
}

std::string render_table(const TableRef& t) {
  std::string out = ident(t.name);
  if (!t.alias.empty()) out += " AS " + ident(t.alias);
  return out;
}

std::string render_select(const SelectQuery& q) {
  std::string out = "SELECT ";
  if (q.distinct) out += "DISTINCT ";
  for (std::size_t i = 0; i < q.select_items.size(); ++i) {
    if (i) out += ", ";
    const auto& item = q.select_items[i];
    out += item.star ? "*" : render(item.expr);
    if (item.alias) out += " AS " + ident(*item.alias);
  }
  out += " FROM " + render_table(q.from);
  for (const auto& j : q.joins) {
    out += j.join_type == "," ? ", " : " " + j.join_type + " ";
    out += render_table(j.table);
    if (!j.on.empty()) out += " ON " + render_conditions(j.on);
  }
  if (!q.where_conditions.empty()) out += " WHERE " + render_conditions(q.where_conditions);
  if (!q.group_by.empty()) {
    out += " GROUP BY ";
    for (std::size_t i = 0; i < q.group_by.size(); ++i) {
      if (i) out += ", ";
      out += render(q.group_by[i]);
    }
  }
  if (!q.order_by.empty()) {
    out += " ORDER BY ";
    for (std::size_t i = 0; i < q.order_by.size(); ++i) {
      if (i) out += ", ";
      out += render(q.order_by[i].expr);
      if (q.order_by[i].descending) out += *q.order_by[i].descending ? " DESC" : " ASC";
    }
  }
  if (q.limit) out += " LIMIT " + std::to_string(*q.limit);
  return out;
}

}  // namespace

std::string render(const ColumnRef& c) {
  if (c.qualifier.empty()) return ident(c.column);
  return ident(c.qualifier) + "." + ident(c.column);
}

std::string render(const Expr& e) {
  if (auto* c = std::get_if<ColumnRef>(&e)) return render(*c);
  const auto& a = std::get<Aggregate>(e);
  std::string out(to_string(a.fn));
  out += "(";
  if (a.distinct) out += "DISTINCT ";
  out += a.arg ? render(*a.arg) : "*";
  return out + ")";
}

std::string render(const Condition& c) {
  std::string rhs = std::holds_alternative<Literal>(c.value)
                        ? std::get<Literal>(c.value).text
                        : render(std::get<ColumnRef>(c.value));
  return render(c.column) + " " + c.op + " " + rhs;
}

std::string render(const ParsedQuery& q) {
  std::string out = render_select(q.left);
  if (q.set_op && q.right) {
    out += " ";
    out += to_string(*q.set_op);
    if (q.set_all) out += " ALL";
    out += " " + render_select(*q.right);
  }
  return out;
}

std::vector<TerminalRef> find_terminals(const ParsedQuery& q) {
  std::vector<TerminalRef> out;
  std::size_t index = 0;
  auto visit = [&](const SelectQuery& s) {
    for (const auto& c : s.where_conditions) {
      if (auto* lit = std::get_if<Literal>(&c.value); lit && lit->is_terminal()) {
        out.push_back({index, c.column, lit->span});
      }
      ++index;
    }
  };
  visit(q.left);
  if (q.right) visit(*q.right);
  return out;
}

}  // namespace askdb::sql
