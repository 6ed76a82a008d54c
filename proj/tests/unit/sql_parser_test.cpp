#include "askdb/sql_parser.hpp"

#include <gtest/gtest.h>

#include "askdb/error.hpp"
#include "askdb/onboarding.hpp"
#include "sql_generator.hpp"

namespace askdb::sql {
namespace {

std::string concat(const std::vector<Token>& tokens) {
  std::string out;
  for (const auto& t : tokens) out += t.text;
  return out;
}

TEST(Tokenize, SimpleSelect) {
  auto toks = tokenize("SELECT * FROM t");
  std::vector<std::pair<TokenKind, std::string>> got;
  for (const auto& t : toks) got.emplace_back(t.kind, t.text);
  std::vector<std::pair<TokenKind, std::string>> want{
      {TokenKind::DML, "SELECT"},  {TokenKind::Whitespace, " "}, {TokenKind::Punctuation, "*"},
      {TokenKind::Whitespace, " "}, {TokenKind::Keyword, "FROM"}, {TokenKind::Whitespace, " "},
      {TokenKind::Identifier, "t"}};
  EXPECT_EQ(got, want);
  EXPECT_EQ(toks[4].position, 9u);
}

TEST(Tokenize, EmptyAndErrors) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_THROW(tokenize("WHERE a = 'x"), UnterminatedLiteral);
  EXPECT_THROW(tokenize("SELECT \"abc FROM t"), UnterminatedLiteral);
  EXPECT_THROW(tokenize("SELECT 1 /* open"), UnterminatedLiteral);
}

TEST(Tokenize, KindsAndQuoting) {
  auto toks = tokenize("select \"Unit Price\" from t where x >= 'it''s' union select y from u");
  EXPECT_EQ(toks[0].kind, TokenKind::DML);
  EXPECT_EQ(toks[2].kind, TokenKind::Identifier);
  EXPECT_EQ(toks[2].text, "\"Unit Price\"");
  EXPECT_EQ(toks[8].kind, TokenKind::Where);
  EXPECT_EQ(toks[12].kind, TokenKind::Operator);
  EXPECT_EQ(toks[14].kind, TokenKind::Literal);
  EXPECT_EQ(toks[14].text, "'it''s'");
  EXPECT_EQ(toks[16].kind, TokenKind::SetOp);
  EXPECT_EQ(tokenize("DROP TABLE x")[0].kind, TokenKind::DML);
}

TEST(Parse, TableOneCustomerQuery) {
  auto q = parse("SELECT customer.email FROM customer WHERE customer.first_name = 'MARY'");
  EXPECT_EQ(q.tables(), std::vector<std::string>{"customer"});
  ASSERT_EQ(q.left.where_conditions.size(), 1u);
  const auto& c = q.left.where_conditions[0];
  EXPECT_EQ(c.column.qualified(), "customer.first_name");
  EXPECT_EQ(c.op, "=");
  EXPECT_EQ(std::get<Literal>(c.value).text, "'MARY'");
}

TEST(Parse, StarHasNoConditions) {
  auto q = parse("SELECT * FROM t");
  ASSERT_EQ(q.left.select_items.size(), 1u);
  EXPECT_TRUE(q.left.select_items[0].star);
  EXPECT_EQ(q.tables(), std::vector<std::string>{"t"});
  EXPECT_TRUE(q.left.where_conditions.empty());
}

TEST(Parse, TableOneJoinWithRedundantOnConjuncts) {
  auto q = parse(
      "SELECT film.title FROM actor JOIN film JOIN film_actor ON actor.actor_id = film_actor.actor_id "
      "AND film_actor.film_id = film.film_id AND actor.actor_id = film_actor.actor_id "
      "WHERE actor.first_name = 'Terminal'");
  EXPECT_EQ(q.tables(), (std::vector<std::string>{"actor", "film", "film_actor"}));
  ASSERT_EQ(q.left.joins.size(), 2u);
  EXPECT_TRUE(q.left.joins[0].on.empty());
  EXPECT_EQ(q.left.joins[1].on.size(), 3u);
}

TEST(Parse, AggregatesGroupOrderLimit) {
  auto q = parse(
      "SELECT Brands.brand_name FROM Dealer_Brand JOIN Brands ON Dealer_Brand.brand_id = Brands.brand_id "
      "GROUP BY Brands.brand_name ORDER BY Count(*) Desc LIMIT 1");
  ASSERT_EQ(q.left.order_by.size(), 1u);
  const auto& agg = std::get<Aggregate>(q.left.order_by[0].expr);
  EXPECT_EQ(agg.fn, AggregateFn::Count);
  EXPECT_FALSE(agg.arg.has_value());
  EXPECT_EQ(q.left.order_by[0].descending, true);
  EXPECT_EQ(q.left.limit, 1);
  EXPECT_EQ(q.left.group_by.size(), 1u);
}

TEST(Parse, SetOperations) {
  auto q = parse("SELECT a.x FROM a UNION ALL SELECT b.x FROM b");
  EXPECT_EQ(q.set_op, SetOpKind::Union);
  EXPECT_TRUE(q.set_all);
  ASSERT_TRUE(q.right.has_value());
  EXPECT_EQ(q.tables(), (std::vector<std::string>{"a", "b"}));
  EXPECT_THROW(parse("SELECT a.x FROM a UNION SELECT b.x FROM b UNION SELECT c.x FROM c"), UnsupportedSyntax);
}

TEST(Parse, RejectsConstructsOutsideTheSubset) {
  for (const char* sql : {
           "SELECT RANK() OVER (PARTITION BY t.a ORDER BY t.b) FROM t",
           "SELECT t.a, ROW_NUMBER() OVER (ORDER BY t.b) FROM t",
           "SELECT SUM(t.a) OVER (PARTITION BY t.b) FROM t",
           "SELECT t.a FROM t WHERE t.b IN (SELECT u.b FROM u)",
           "SELECT t.a FROM t WHERE t.b BETWEEN 1 AND 2",
           "SELECT t.a FROM t WHERE t.b IS NULL",
           "SELECT t.a FROM t GROUP BY t.a HAVING COUNT(*) > 1",
           "SELECT t.a FROM t LIMIT 1 OFFSET 2",
           "SELECT t.a FROM t EXCEPT SELECT u.a FROM u",
           "SELECT UPPER(t.a) FROM t",
           "SELECT t.a FROM (SELECT * FROM u) t",
           "WITH x AS (SELECT 1) SELECT * FROM x",
           "DELETE FROM t",
           "SELECT t.a FROM t WHERE (t.a = 1)",
       }) {
    EXPECT_THROW(parse(sql), UnsupportedSyntax) << sql;
  }
}

OnboardedDatabase schema() {
  OnboardedDatabase db;
  auto table = [](std::string name, std::vector<std::string> cols) {
    TableMeta t;
    t.name = t.original_name = name;
    for (auto& c : cols) {
      ColumnMeta m;
      m.original_name = m.cleaned_name = c;
      t.columns.push_back(m);
    }
    return t;
  };
  db.tables = {table("customer", {"customer_id", "first_name", "email"}),
               table("orders", {"order_id", "customer_id", "total"})};
  return db;
}

TEST(Parse, ResolvesUnqualifiedColumnsAgainstSchema) {
  auto db = schema();
  auto q = parse("SELECT email FROM Customer c JOIN orders ON c.customer_id = orders.customer_id WHERE total > 5", &db);
  EXPECT_EQ(std::get<ColumnRef>(q.left.select_items[0].expr).table, "customer");
  EXPECT_EQ(q.left.where_conditions[0].column.qualified(), "orders.total");
  EXPECT_EQ(q.left.from.resolved, "customer");
  EXPECT_THROW(parse("SELECT customer_id FROM customer JOIN orders", &db), UnknownIdentifier);
  EXPECT_THROW(parse("SELECT nope FROM customer", &db), UnknownIdentifier);
  EXPECT_THROW(parse("SELECT email FROM nowhere", &db), UnknownIdentifier);
}

TEST(FindTerminals, SourceOrderWithOffsets) {
  std::string sql =
      "SELECT t.a FROM t WHERE t.lo >= 'Terminal' AND t.name = 'x' AND t.hi <= 'Terminal' "
      "UNION SELECT u.a FROM u WHERE u.place = 'Terminal'";
  auto terminals = find_terminals(parse(sql));
  ASSERT_EQ(terminals.size(), 3u);
  EXPECT_EQ(terminals[0].column.qualified(), "t.lo");
  EXPECT_EQ(terminals[0].condition_index, 0u);
  EXPECT_EQ(terminals[1].column.qualified(), "t.hi");
  EXPECT_EQ(terminals[1].condition_index, 2u);
  EXPECT_EQ(terminals[2].column.qualified(), "u.place");
  for (const auto& t : terminals) EXPECT_EQ(sql.substr(t.span.offset, t.span.length), "'Terminal'");
  EXPECT_LT(terminals[0].span.offset, terminals[1].span.offset);
  EXPECT_TRUE(find_terminals(parse("SELECT * FROM t WHERE t.a = 'terminal'")).empty());
}

TEST(Properties, GeneratedCorpusIsLosslessAndRoundTrips) {
  testing::SqlGenerator gen(20240601);
  for (int i = 0; i < 3000; ++i) {
    std::string sql = gen.statement();
    ASSERT_EQ(concat(tokenize(sql)), sql);
    ParsedQuery q;
    ASSERT_NO_THROW(q = parse(sql)) << sql;
    std::string rendered = render(q);
    ParsedQuery again = parse(rendered);
    ASSERT_EQ(again, q) << sql << "\n" << rendered;
    ASSERT_EQ(render(again), rendered);
  }
}

}  // namespace
}  // namespace askdb::sql
