// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "askdb/datetime_normalizer.hpp"
#include "askdb/error.hpp"
#include "askdb/executor.hpp"
#include "askdb/onboarding.hpp"
#include "askdb/service.hpp"
#include "askdb/spell.hpp"
#include "askdb/sql_explainer.hpp"
#include "askdb/sql_parser.hpp"
#include "askdb/text.hpp"
#include "askdb/translator.hpp"
#include "askdb/viz_ranker.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "sql_generator.hpp"

using namespace askdb;
namespace chr = std::chrono;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Clock = chr::steady_clock;

double seconds_since(Clock::time_point start) {
  return chr::duration<double>(Clock::now() - start).count();
}

class CountingTranslator : public Translator {
 public:
  explicit CountingTranslator(std::shared_ptr<Translator> inner) : inner_(std::move(inner)) {}
  CandidateSql translate(const NormalizedQuery& q, const OnboardedDatabase& s) override {
    ++calls;
    return inner_->translate(q, s);
  }
  std::atomic<int> calls{0};

 private:
  std::shared_ptr<Translator> inner_;
};

std::shared_ptr<Translator> fixture_translator() {
  return std::make_shared<FixtureTranslator>(FixtureTranslator::load(testing::fixture("translations.json")));
}

std::unique_ptr<Service> make_service(const testing::TempDir& dir, std::shared_ptr<Translator> translator) {
  ServiceOptions options;
  options.data_root = dir.file("root");
  options.translator = std::move(translator);
  options.lexicon_dir = testing::data_dir();
  return std::make_unique<Service>(options);
}

Outcome table_one() {
  Outcome o;
  testing::TempDir dir;
  auto start = Clock::now();
  auto service = make_service(dir, fixture_translator());
  auto sakila = service->onboard_file(testing::make_sakila(dir), {}).id;
  auto clicks = service->onboard_file(testing::fixture("ad_clicks.csv"), {}).id;
  auto quakes =
      service->onboard_file(testing::fixture("quakes.csv"), testing::load_config("quakes.config.json")).id;

  const std::string join =
      "SELECT film.title FROM actor JOIN film JOIN film_actor ON actor.actor_id = film_actor.actor_id AND "
      "film_actor.film_id = film.film_id AND actor.actor_id = film_actor.actor_id WHERE actor.first_name = ";
  struct Row {
    std::string db, question, sql;
    bool expect_warning;
  };
  const std::vector<Row> rows = {
      {sakila, "What are the email addresses of the customer whose first name is MARY?",
       "SELECT customer.email FROM customer WHERE customer.first_name = 'MARY'", false},
      {sakila, "Name all movies starring Jhonny Cage", join + "'JOHNNY'", false},
      {clicks, "show me the number of customers who clicked on the ad at least two times",
       "SELECT Count(*) FROM ad_clicks WHERE ad_clicks.clicks >= 2", false},
      {quakes, "Which places had a positive longitude value?",
       "SELECT DISTINCT quakes.place FROM quakes WHERE quakes.longitude = 'Terminal'", true},
  };
  int passed = 0;
  for (const auto& row : rows) {
    try {
      auto r = service->query(row.db, row.question);
      bool warned = std::any_of(r.warnings.begin(), r.warnings.end(),
                                [](const std::string& w) { return w.find("Terminal") != std::string::npos; });
      if (r.sql != row.sql) {
        o.fail("'" + row.question + "' resolved to " + r.sql);
      } else if (warned != row.expect_warning) {
        o.fail("'" + row.question + "' warning mismatch");
      } else {
        ++passed;
      }
    } catch (const std::exception& e) {
      o.fail("'" + row.question + "' threw " + e.what());
    }
  }
  double t = seconds_since(start);
  if (t >= 5.0) o.fail("took " + std::to_string(t) + " s");
  if (o.pass) o.detail = std::to_string(passed) + "/4 rows, " + std::to_string(t) + " s";
  return o;
}

Outcome explainer_golden() {
  Outcome o;
  const std::string expected = "Column(s): All Table(s): customers, Filtered on: customers.region = 'INDIA'";
  auto got = explain(sql::parse("SELECT * FROM customers WHERE customers.region = 'INDIA'")).render();
  if (got != expected) o.fail("got \"" + got + "\"");
  return o;
}

// Expected strings for relative forms are computed with std::chrono.
std::string compact(chr::year_month_day d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

std::string month_year(chr::year_month ym) {
  static const char* const names[] = {"January", "February", "March",     "April",   "May",      "June",
                                      "July",    "August",   "September", "October", "November", "December"};
  return std::string("Month: ") + names[static_cast<unsigned>(ym.month()) - 1] +
         ", Year: " + std::to_string(static_cast<int>(ym.year()));
}

Outcome datetime_suite() {
  Outcome o;
  const CivilDate fixed{2021, 6, 15};
  const std::vector<std::pair<std::string, std::string>> absolute = {
      {"earthquakes on 2021-07-04", "earthquakes on 20210704"},
      {"orders placed 05/06/2021", "orders placed 20210605"},
      {"quakes on 4th October 2020", "quakes on 20201004"},
      {"revenue on March 3, 2019", "revenue on 20190303"},
      {"signups on 29 February 2024", "signups on 20240229"},
      {"customers who joined in June 2021", "customers who joined in Month: June, Year: 2021"},
      {"sales for Sept 2020", "sales for Month: September, Year: 2020"},
      {"orders from Jan, 2022", "orders from Month: January, Year: 2022"},
      {"returns in december 1999", "returns in Month: December, Year: 1999"},
      {"matches played in 2019", "matches played in Year: 2019"},
      {"revenue for the year 2018", "revenue for the Year: 2018"},
      {"flights since 2005", "flights since Year: 2005"},
  };
  int checked = 0;
  for (const auto& [q, want] : absolute) {
    auto got = normalize_query(q, fixed).normalized;
    ++checked;
    if (got != want) o.fail("'" + q + "' -> '" + got + "'");
  }
  using Expect = std::function<std::string(chr::year_month_day)>;
  auto days = [](int n) -> Expect {
    return [n](chr::year_month_day r) { return compact(chr::year_month_day{chr::sys_days(r) + chr::days(n)}); };
  };
  auto months = [](int n) -> Expect {
    return [n](chr::year_month_day r) { return month_year(r.year() / r.month() + chr::months(n)); };
  };
  auto years = [](int n) -> Expect {
    return [n](chr::year_month_day r) { return "Year: " + std::to_string(static_cast<int>(r.year()) + n); };
  };
  auto week = [](int n) -> Expect {
    return [n](chr::year_month_day r) {
      chr::sys_days d(r);
      chr::sys_days monday = d - chr::days(chr::weekday(d).iso_encoding() - 1) + chr::days(7 * n);
      chr::year_month_day m(monday);
      return month_year(m.year() / m.month());
    };
  };
  const std::vector<std::tuple<std::string, std::string, Expect>> relative = {
      {"what did we sell ", "yesterday", days(-1)},   {"orders placed ", "today", days(0)},
      {"deliveries due ", "tomorrow", days(1)},        {"revenue ", "last month", months(-1)},
      {"bookings ", "next month", months(1)},          {"signups ", "last week", week(-1)},
      {"customers acquired ", "last year", years(-1)}, {"targets for ", "this year", years(0)},
  };
  const CivilDate refs[] = {{2021, 6, 15}, {2020, 1, 1}, {2024, 3, 1}};
  for (const auto& [prefix, phrase, expect] : relative) {
    ++checked;
    for (const auto& ref : refs) {
      chr::year_month_day r{chr::year{ref.year} / chr::month{ref.month} / chr::day{ref.day}};
      std::string want = prefix + expect(r);
      std::string got = normalize_query(prefix + phrase, ref).normalized;
      if (got != want) o.fail("'" + prefix + phrase + "' at " + calendar::to_iso(ref) + " -> '" + got + "'");
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " utterances, 3 reference times";
  return o;
}

Outcome onboarding_round_trip() {
  Outcome o;
  std::mt19937 rng(1000);
  struct Case {
    const char* pattern;
    int order;  // 0 = y m d, 1 = d m y, 2 = m d y
    const char* printf_format;
  };
  const Case cases[] = {{"yyyy-mm-dd", 0, "%04d-%02d-%02d"}, {"dd/mm/yyyy", 1, "%02d/%02d/%04d"},
                        {"mm.dd.yyyy", 2, "%02d.%02d.%04d"}};
  static const char* const names[] = {"January", "February", "March",     "April",   "May",      "June",
                                      "July",    "August",   "September", "October", "November", "December"};
  ColumnMeta col;
  col.original_name = col.cleaned_name = "when";
  col.data_type = DataType::Datetime;
  int failures = 0;
  int total = 0;
  for (const auto& c : cases) {
    auto fmt = DateFormat::compile(c.pattern);
    std::vector<std::optional<std::string>> values;
    for (int i = 0; i < 1000; ++i) {
      int y = 1900 + static_cast<int>(rng() % 200);
      int m = 1 + static_cast<int>(rng() % 12);
      int d = 1 + static_cast<int>(rng() % calendar::days_in_month(y, static_cast<unsigned>(m)));
      char buf[16];
      if (c.order == 0) std::snprintf(buf, sizeof buf, c.printf_format, y, m, d);
      if (c.order == 1) std::snprintf(buf, sizeof buf, c.printf_format, d, m, y);
      if (c.order == 2) std::snprintf(buf, sizeof buf, c.printf_format, m, d, y);
      values.emplace_back(buf);
    }
    auto derived = expand_datetime_column(col, fmt, values);
    for (std::size_t i = 0; i < values.size(); ++i) {
      ++total;
      int d = static_cast<int>(std::get<std::int64_t>(derived[0].values[i]));
      int m = static_cast<int>(std::get<std::int64_t>(derived[1].values[i]));
      int y = static_cast<int>(std::get<std::int64_t>(derived[2].values[i]));
      char buf[16];
      if (c.order == 0) std::snprintf(buf, sizeof buf, c.printf_format, y, m, d);
      if (c.order == 1) std::snprintf(buf, sizeof buf, c.printf_format, d, m, y);
      if (c.order == 2) std::snprintf(buf, sizeof buf, c.printf_format, m, d, y);
      bool names_ok = m >= 1 && m <= 12 && std::get<std::string>(derived[4].values[i]) == names[m - 1] &&
                      std::get<std::string>(derived[3].values[i]) == std::string(names[m - 1]).substr(0, 3);
      if (buf != *values[i] || !names_ok) {
        ++failures;
        o.fail(std::string(c.pattern) + ": " + *values[i] + " recomposed as " + buf);
      }
    }
  }
  if (o.pass) o.detail = std::to_string(total) + " values, 0 failures";
  return o;
}

Outcome parser_properties() {
  Outcome o;
  testing::SqlGenerator gen(424242);
  const int cases = 10000;
  int violations = 0;
  for (int i = 0; i < cases && violations < 5; ++i) {
    std::string sql = gen.statement();
    try {
      std::string joined;
      for (const auto& t : sql::tokenize(sql)) joined += t.text;
      if (joined != sql) {
        ++violations;
        o.fail("tokenization lost text in: " + sql);
        continue;
      }
      auto q = sql::parse(sql);
      auto rendered = sql::render(q);
      if (!(sql::parse(rendered) == q)) {
        ++violations;
        o.fail("round trip changed: " + sql);
      }
    } catch (const std::exception& e) {
      ++violations;
      o.fail("generated statement rejected: " + sql + " (" + e.what() + ")");
    }
  }
  for (const char* w : {"SELECT RANK() OVER (ORDER BY t.a) FROM t",
                        "SELECT t.a, ROW_NUMBER() OVER (PARTITION BY t.b ORDER BY t.a) FROM t",
                        "SELECT SUM(t.a) OVER (PARTITION BY t.b) FROM t", "SELECT t.a, LAG(t.a) OVER w FROM t"}) {
    try {
      sql::parse(w);
      o.fail(std::string("window function accepted: ") + w);
    } catch (const UnsupportedSyntax&) {
    } catch (const std::exception& e) {
      o.fail(std::string("window function raised ") + e.what());
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " generated cases, 0 violations";
  return o;
}

Outcome resolver_oracle() {
  Outcome o;
  auto all = read_word_list(testing::data_dir() + "/lexicon/english_words.txt");
  std::vector<std::string> english(all.begin(), all.begin() + std::min<std::size_t>(all.size(), 5000));
  // Value tokens of the fixture columns the resolver corrects against.
  std::vector<std::string> column_words = {"johnny", "penelope", "lollobrigida", "guiness", "zero", "cage",
                                           "nick", "wahlberg", "mary", "patricia", "colorado", "nevada"};
  WordIndex e(english), c(column_words);
  std::mt19937 rng(500);
  const std::string letters = "abcdefghijklmnopqrstuvwxyz";
  int mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    std::string w = rng() % 2 ? column_words[rng() % column_words.size()] : english[rng() % english.size()];
    int edits = 1 + static_cast<int>(rng() % 2);
    for (int k = 0; k < edits; ++k) {
      std::size_t pos = rng() % w.size();
      switch (rng() % 4) {
        case 0: w[pos] = letters[rng() % 26]; break;
        case 1: if (w.size() > 2) w.erase(pos, 1); break;
        case 2: w.insert(pos, 1, letters[rng() % 26]); break;
        default: if (pos + 1 < w.size()) std::swap(w[pos], w[pos + 1]);
      }
    }
    auto got = correct_token(w, e, c).corrected;
    auto want = oracle::best_correction(w, english, column_words);
    if (got != want) {
      ++mismatches;
      o.fail("'" + w + "' corrected to '" + got + "', scan says '" + want + "'");
    }
  }
  if (o.pass) o.detail = "500 misspellings, 0 mismatches";
  return o;
}

std::vector<viz::VisualizationNode> random_nodes(std::mt19937& rng, std::size_t n) {
  using namespace viz;
  const ChartType charts[] = {ChartType::Bar, ChartType::Line, ChartType::Pie, ChartType::Scatter};
  const Aggregate aggs[] = {Aggregate::None, Aggregate::Sum, Aggregate::Avg, Aggregate::Count};
  const AxisKind kinds[] = {AxisKind::Categorical, AxisKind::Numeric, AxisKind::Temporal};
  std::vector<VisualizationNode> out;
  for (std::size_t i = 0; i < n; ++i) {
    VisualizationNode v;
    v.chart_type = charts[rng() % 4];
    v.x = rng() % 2 ? "a" : "b";
    if (rng() % 3) v.y = "c";
    v.aggregate = aggs[rng() % 4];
    v.score = std::uniform_real_distribution<double>(0, 1)(rng);
    v.features.chart_type = v.chart_type;
    v.features.aggregated = v.aggregate != Aggregate::None;
    v.features.x_kind = kinds[rng() % 3];
    v.features.distinct_x = rng() % 20;
    v.features.row_count = 1 + rng() % 50;
    v.features.group_count = rng() % 50;
    v.features.null_ratio = static_cast<double>(rng() % 5) / 4;
    out.push_back(v);
  }
  return out;
}

Outcome ranking_oracles() {
  Outcome o;
  auto start = Clock::now();
  std::mt19937 rng(200);
  auto rules = viz::PartialOrderRules::defaults();
  for (int trial = 0; trial < 200; ++trial) {
    auto nodes = random_nodes(rng, 2 + rng() % 14);
    std::vector<std::vector<bool>> rel(nodes.size(), std::vector<bool>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = 0; j < nodes.size(); ++j) rel[i][j] = i != j && rules.prefers(nodes[i], nodes[j]);
    auto closure = oracle::transitive_closure(rel);
    try {
      auto ranked = viz::rank_partial_order(nodes, rules);
      for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < nodes.size(); ++j)
          if (closure[i][j] && !(ranked[i].score > ranked[j].score))
            o.fail("partial order violated in set " + std::to_string(trial));
    } catch (const std::exception& e) {
      o.fail("partial order threw " + std::string(e.what()));
    }
  }
  int diversified = 0;
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::size_t k = 1; k <= 3; ++k) {
      for (int rep = 0; rep < 25; ++rep) {
        auto nodes = random_nodes(rng, n);
        double lambda = rep == 0 ? 0.0 : std::uniform_real_distribution<double>(0, 1)(rng);
        auto want = oracle::diversified_brute_force(nodes, k, lambda);
        auto got = viz::rank_diversified(nodes, {k, lambda});
        ++diversified;
        bool same = got.size() == want.size();
        for (std::size_t i = 0; same && i < got.size(); ++i) same = got[i].to_json() == nodes[want[i]].to_json();
        if (!same) o.fail("diversified mismatch n=" + std::to_string(n) + " k=" + std::to_string(k));
      }
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    auto nodes = random_nodes(rng, 1 + rng() % 12);
    std::size_t k = 1 + rng() % 5;
    auto sorted = nodes;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    auto got = viz::rank_diversified(nodes, {k, 1.0});
    if (got.size() != std::min(k, nodes.size())) o.fail("lambda=1 returned the wrong count");
    for (std::size_t i = 0; i < got.size(); ++i)
      if (got[i].score != sorted[i].score) o.fail("lambda=1 is not relevance order");
  }
  double t = seconds_since(start);
  if (t >= 60) o.fail("took " + std::to_string(t) + " s");
  if (o.pass) {
    o.detail = "200 partial-order sets, " + std::to_string(diversified) + " diversified instances, " +
               std::to_string(t) + " s";
  }
  return o;
}

Outcome cache_behavior() {
  Outcome o;
  testing::TempDir dir;
  auto counting = std::make_shared<CountingTranslator>(fixture_translator());
  auto service = make_service(dir, counting);
  auto sakila = service->onboard_file(testing::make_sakila(dir), {}).id;
  const std::string mary = "What are the email addresses of the customer whose first name is MARY?";
  for (int i = 0; i < 5; ++i) service->query(sakila, mary);
  if (counting->calls != 1) o.fail("5 identical queries reached the backend " + std::to_string(counting->calls) + " times");
  auto customers =
      service->onboard_file(testing::fixture("customers.csv"), testing::load_config("customers.config.json")).id;
  for (const char* q : {"Which customers ordered after 15 March 2021?", "Which customers ordered after 2021-03-15?",
                        "Which customers ordered after 15/03/2021?"}) {
    service->query(customers, q);
  }
  if (counting->calls != 2) {
    o.fail("three spellings of one normalized query gave " + std::to_string(counting->calls - 1) + " backend calls");
  }
  if (o.pass) o.detail = "8 requests, 2 distinct normalized queries, 2 backend calls";
  return o;
}

Outcome executor_safety() {
  Outcome o;
  testing::TempDir dir;
  auto store = testing::make_sakila(dir);
  auto before = oracle::store_checksum(store);
  std::vector<std::string> reached;
  ExecutorOptions options;
  options.statement_observer = [&](std::string_view s) { reached.emplace_back(s); };
  const std::vector<std::string> selects = {
      "SELECT * FROM actor", "select customer.email from customer where customer.first_name = 'MARY'",
      "SELECT Count(*) FROM film_actor;", "/* lead */ SELECT film.title FROM film LIMIT 3",
      "SELECT 'DROP TABLE actor' FROM actor"};
  const std::vector<std::string> others = {
      "DROP TABLE actor", "DELETE FROM customer", "UPDATE film SET title = 'x'",
      "INSERT INTO actor VALUES (999, 'A', 'B')", "SELECT 1; DROP TABLE film", "PRAGMA writable_schema = 1",
      "CREATE TABLE t (a)", "ATTACH DATABASE ':memory:' AS m", "ALTER TABLE actor ADD COLUMN x",
      "REPLACE INTO actor VALUES (1, 'A', 'B')", "VACUUM", "-- SELECT\nDELETE FROM actor",
      "SELECT * FROM actor; SELECT * FROM film", "BEGIN; DELETE FROM actor; COMMIT", "REINDEX",
      "WITH x AS (SELECT 1) DELETE FROM actor"};
  std::mt19937 rng(1000);
  int accepted = 0;
  int rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    bool select = rng() % 2;
    const auto& sql = select ? selects[rng() % selects.size()] : others[rng() % others.size()];
    try {
      execute(sql, store, options);
      ++accepted;
      if (!select) o.fail("accepted: " + sql);
    } catch (const RejectedStatement&) {
      ++rejected;
      if (select) o.fail("rejected a SELECT: " + sql);
    } catch (const std::exception& e) {
      o.fail("unexpected error for " + sql + ": " + e.what());
    }
  }
  for (const auto& s : reached) {
    std::string head = text::to_upper(std::string(text::trim(s)));
    auto stripped = head;
    if (stripped.rfind("/*", 0) == 0) stripped = std::string(text::trim(stripped.substr(stripped.find("*/") + 2)));
    if (stripped.rfind("SELECT", 0) != 0) o.fail("reached the store: " + s);
  }
  if (oracle::store_checksum(store) != before) o.fail("store checksum changed");
  if (o.pass) {
    o.detail = "1000 requests (" + std::to_string(accepted) + " run, " + std::to_string(rejected) +
               " rejected), checksum unchanged";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"table1_fixture_suite", table_one},
      {"explainer_golden", explainer_golden},
      {"datetime_suite", datetime_suite},
      {"onboarding_round_trip", onboarding_round_trip},
      {"parser_properties", parser_properties},
      {"resolver_spell_oracle", resolver_oracle},
      {"ranking_oracles", ranking_oracles},
      {"translation_cache", cache_behavior},
      {"executor_safety", executor_safety},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.fail(std::string("threw: ") + e.what());
    }
    if (o.pass) {
      std::cout << "PASS " << name << (o.detail.empty() ? "" : ": " + o.detail) << "\n";
    } else {
      ++failed;
      std::cout << "FAIL " << name << ": " << o.detail << "\n";
    }
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
