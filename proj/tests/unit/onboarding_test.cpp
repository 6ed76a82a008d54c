#include "askdb/onboarding.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <random>

#include "askdb/error.hpp"
#include "fixtures.hpp"

namespace askdb {
namespace {

using testing::TempDir;

const char* const kLong[] = {"January", "February", "March",     "April",   "May",      "June",
                             "July",    "August",   "September", "October", "November", "December"};

ColumnMeta column(std::string name, DataType type = DataType::Textual) {
  ColumnMeta c;
  c.original_name = name;
  c.cleaned_name = clean_identifier(name);
  c.data_type = type;
  return c;
}

TEST(CleanIdentifier, Examples) {
  EXPECT_EQ(clean_identifier("toss winner"), "toss_winner");
  EXPECT_EQ(clean_identifier("quantity"), "quantity");
  EXPECT_EQ(clean_identifier("Order-Date (UTC)"), "order_date_utc");
  EXPECT_EQ(clean_identifier("  Unit   Price  "), "unit_price");
  EXPECT_EQ(clean_identifier("a__b"), "a_b");
}

TEST(CleanIdentifier, RejectsIdentifiersWithoutAlphanumerics) {
  EXPECT_THROW(clean_identifier("  "), OnboardingError);
  EXPECT_THROW(clean_identifier("(-)"), OnboardingError);
}

TEST(CleanIdentifier, IdempotentAndWellFormedOnRandomInput) {
  std::mt19937 rng(5);
  const std::string alphabet = "aZ9 _-().,/\t#";
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    for (std::size_t k = 1 + rng() % 12; k > 0; --k) s += alphabet[rng() % alphabet.size()];
    std::string once;
    try {
      once = clean_identifier(s);
    } catch (const OnboardingError&) {
      continue;
    }
    ASSERT_FALSE(once.empty());
    for (char c : once) ASSERT_TRUE((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_') << s;
    ASSERT_NE(once.front(), '_');
    ASSERT_EQ(once.find("__"), std::string::npos);
    ASSERT_EQ(clean_identifier(once), once) << s;
  }
}

TEST(ApplySynonyms, ConcatenatesSynonyms) {
  auto c = apply_synonyms(column("heading"), {"title", "headline"}, {});
  EXPECT_EQ(c.cleaned_name, "heading_title_headline");
  EXPECT_EQ(c.synonyms, (std::vector<std::string>{"title", "headline"}));
  EXPECT_EQ(apply_synonyms(column("price"), {}, {}).cleaned_name, "price");
}

TEST(ApplySynonyms, CollisionWithPeerTokenIsAmbiguous) {
  std::vector<ColumnMeta> peers{column("title"), column("price")};
  EXPECT_THROW(apply_synonyms(column("heading"), {"title"}, peers), AmbiguityError);
  std::vector<ColumnMeta> token_peer{column("unit price")};
  EXPECT_THROW(apply_synonyms(column("cost"), {"price"}, token_peer), AmbiguityError);
  EXPECT_NO_THROW(apply_synonyms(column("heading"), {"headline"}, peers));
}

TEST(ExpandDatetime, DerivesDayMonthYearAndNames) {
  auto fmt = DateFormat::compile("yyyy-mm-dd");
  std::vector<std::optional<std::string>> values{"2020-10-04", std::nullopt, "2021-01-31"};
  auto derived = expand_datetime_column(column("invoice date", DataType::Datetime), fmt, values);
  ASSERT_EQ(derived.size(), 5u);
  EXPECT_EQ(derived[0].meta.cleaned_name, "invoice_date_day");
  EXPECT_EQ(derived[1].meta.cleaned_name, "invoice_date_month");
  EXPECT_EQ(derived[2].meta.cleaned_name, "invoice_date_year");
  EXPECT_EQ(derived[3].meta.cleaned_name, "invoice_date_month_name_short");
  EXPECT_EQ(derived[4].meta.cleaned_name, "invoice_date_month_name_long");
  EXPECT_EQ(derived[0].values[0], Value{std::int64_t{4}});
  EXPECT_EQ(derived[1].values[0], Value{std::int64_t{10}});
  EXPECT_EQ(derived[2].values[0], Value{std::int64_t{2020}});
  EXPECT_EQ(derived[3].values[0], Value{std::string("Oct")});
  EXPECT_EQ(derived[4].values[0], Value{std::string("October")});
  for (const auto& d : derived) EXPECT_TRUE(is_null(d.values[1]));
  EXPECT_EQ(derived[0].values[2], Value{std::int64_t{31}});
  EXPECT_EQ(derived[4].values[2], Value{std::string("January")});
}

TEST(ExpandDatetime, MismatchReportsRow) {
  auto fmt = DateFormat::compile("dd/mm/yyyy");
  std::vector<std::optional<std::string>> values{"01/02/2020", "2020-02-01"};
  try {
    expand_datetime_column(column("d", DataType::Datetime), fmt, values);
    FAIL() << "expected FormatMismatch";
  } catch (const FormatMismatch& e) {
    EXPECT_EQ(e.row(), 1u);
  }
}

// Values are written by snprintf, independently of DateFormat::format, and
// re-composed from the derived columns.
TEST(ExpandDatetime, RandomDatesRecompose) {
  std::mt19937 rng(2024);
  struct Case {
    const char* pattern;
    const char* printf_format;  // year, month, day argument order handled below
    int order;                  // 0 = y m d, 1 = d m y, 2 = m d y
  };
  const Case cases[] = {{"yyyy-mm-dd", "%04d-%02d-%02d", 0},
                        {"dd/mm/yyyy", "%02d/%02d/%04d", 1},
                        {"mm.dd.yyyy", "%02d.%02d.%04d", 2}};
  for (const auto& c : cases) {
    auto fmt = DateFormat::compile(c.pattern);
    std::vector<std::optional<std::string>> values;
    std::vector<std::array<int, 3>> truth;
    for (int i = 0; i < 400; ++i) {
      int y = 1900 + static_cast<int>(rng() % 200);
      int m = 1 + static_cast<int>(rng() % 12);
      int d = 1 + static_cast<int>(rng() % calendar::days_in_month(y, static_cast<unsigned>(m)));
      char buf[16];
      if (c.order == 0) std::snprintf(buf, sizeof buf, c.printf_format, y, m, d);
      if (c.order == 1) std::snprintf(buf, sizeof buf, c.printf_format, d, m, y);
      if (c.order == 2) std::snprintf(buf, sizeof buf, c.printf_format, m, d, y);
      values.emplace_back(buf);
      truth.push_back({y, m, d});
    }
    auto derived = expand_datetime_column(column("when", DataType::Datetime), fmt, values);
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto [y, m, d] = truth[i];
      ASSERT_EQ(derived[0].values[i], Value{std::int64_t{d}});
      ASSERT_EQ(derived[1].values[i], Value{std::int64_t{m}});
      ASSERT_EQ(derived[2].values[i], Value{std::int64_t{y}});
      ASSERT_EQ(std::get<std::string>(derived[4].values[i]), kLong[m - 1]);
      ASSERT_EQ(std::get<std::string>(derived[3].values[i]), std::string(kLong[m - 1]).substr(0, 3));
    }
  }
}

TEST(OnboardingConfig, JsonRoundTrip) {
  auto cfg = OnboardingConfig::from_json(
      R"({"renames":{"PCs":"quantity"},"synonyms":{"heading":["title"]},"datetime_columns":{"sales.when":"yyyy-mm-dd"}})");
  EXPECT_EQ(cfg.renames.at("PCs"), "quantity");
  auto back = OnboardingConfig::from_json(cfg.to_json());
  EXPECT_EQ(back.synonym_map, cfg.synonym_map);
  EXPECT_EQ(back.datetime_columns, cfg.datetime_columns);
  EXPECT_THROW(OnboardingConfig::from_json("{not json"), OnboardingError);
}

RawTable match_table() {
  RawTable t;
  t.name = "Match";
  t.columns = {"toss winner", "Played On", "Runs"};
  t.rows = {{std::string("CSK"), std::string("2020-10-04"), std::string("180")},
            {std::string("MI"), std::monostate{}, std::string("201")}};
  return t;
}

TEST(OnboardDatabase, CleansNamesExpandsDatesAndWritesStore) {
  TempDir dir;
  OnboardingConfig cfg;
  cfg.datetime_columns["Played On"] = "yyyy-mm-dd";
  auto db = onboard_database({match_table()}, cfg, {"m_1", dir.file("store.sqlite"), "now"});
  ASSERT_EQ(db.tables.size(), 1u);
  const auto& t = db.tables[0];
  EXPECT_EQ(t.name, "match");
  ASSERT_EQ(t.columns.size(), 3u + 5u);
  EXPECT_EQ(db.rename_ledger.columns.at("match").at("toss winner"), "toss_winner");
  EXPECT_EQ(db.derived_columns.at("match.played_on").size(), 5u);
  EXPECT_EQ(t.find_column("runs")->data_type, DataType::Numeric);
  EXPECT_EQ(t.find_column("played_on")->data_type, DataType::Datetime);

  sqlite::Database store(db.store_path, sqlite::OpenMode::ReadOnly);
  auto st = store.prepare("SELECT toss_winner, played_on, played_on_month_name_long, runs FROM match ORDER BY rowid");
  ASSERT_TRUE(st.step());
  EXPECT_EQ(st.column(0), Value{std::string("CSK")});
  EXPECT_EQ(st.column(1), Value{std::int64_t{20201004}});
  EXPECT_EQ(st.column(2), Value{std::string("October")});
  EXPECT_EQ(st.column(3), Value{std::int64_t{180}});
  ASSERT_TRUE(st.step());
  EXPECT_TRUE(is_null(st.column(1)));
}

TEST(OnboardDatabase, AlreadyCleanSchemaIsAFixpoint) {
  TempDir dir;
  RawTable t;
  t.name = "sales";
  t.columns = {"region", "revenue"};
  t.rows = {{std::string("INDIA"), std::string("10.5")}};
  auto db = onboard_database({t}, {}, {"s_1", dir.file("s.sqlite"), "now"});
  EXPECT_EQ(db.tables[0].columns[0].cleaned_name, "region");
  EXPECT_EQ(db.tables[0].columns[1].cleaned_name, "revenue");
  EXPECT_TRUE(db.derived_columns.empty());
}

TEST(OnboardDatabase, Errors) {
  TempDir dir;
  RawTable dup;
  dup.name = "t";
  dup.columns = {"Unit Price", "unit-price"};
  EXPECT_THROW(onboard_database({dup}, {}, {"x", dir.file("a.sqlite"), "now"}), OnboardingError);

  OnboardingConfig missing;
  missing.datetime_columns["nope"] = "yyyy-mm-dd";
  EXPECT_THROW(onboard_database({match_table()}, missing, {"x", dir.file("b.sqlite"), "now"}), OnboardingError);

  OnboardingConfig bad_dates;
  bad_dates.datetime_columns["toss winner"] = "yyyy-mm-dd";
  EXPECT_THROW(onboard_database({match_table()}, bad_dates, {"x", dir.file("c.sqlite"), "now"}), FormatMismatch);

  OnboardingConfig ambiguous;
  ambiguous.synonym_map["Runs"] = {"winner"};
  EXPECT_THROW(onboard_database({match_table()}, ambiguous, {"x", dir.file("d.sqlite"), "now"}), AmbiguityError);
}

TEST(OnboardDatabase, DeterministicSchemaAndJsonRoundTrip) {
  TempDir dir;
  OnboardingConfig cfg;
  cfg.datetime_columns["Played On"] = "yyyy-mm-dd";
  cfg.synonym_map["Runs"] = {"score"};
  auto a = onboard_database({match_table()}, cfg, {"m", dir.file("a.sqlite"), "t0"});
  auto b = onboard_database({match_table()}, cfg, {"m", dir.file("b.sqlite"), "t0"});
  EXPECT_EQ(schema_to_json(a), schema_to_json(b));
  EXPECT_EQ(schema_to_json(schema_from_json(schema_to_json(a))), schema_to_json(a));
  EXPECT_NE(a.find_column("match", "runs_score"), nullptr);
  EXPECT_NE(a.find_column("MATCH", "Runs_Score"), nullptr);
}

TEST(LoadSource, SqliteAndCsvFixtures) {
  TempDir dir;
  auto tables = load_source_file(testing::make_sakila(dir));
  ASSERT_EQ(tables.size(), 4u);
  EXPECT_EQ(tables[0].name, "actor");
  auto csv = load_source_file(testing::fixture("quakes.csv"));
  ASSERT_EQ(csv.size(), 1u);
  EXPECT_EQ(csv[0].name, "quakes");
  EXPECT_EQ(csv[0].rows.size(), 40u);
}

}  // namespace
}  // namespace askdb
