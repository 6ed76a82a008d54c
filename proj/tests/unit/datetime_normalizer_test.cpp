#include "askdb/datetime_normalizer.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>

namespace askdb {
namespace {

namespace chr = std::chrono;

const char* const kMonths[] = {"January", "February", "March",     "April",   "May",      "June",
                               "July",    "August",   "September", "October", "November", "December"};

chr::year_month_day ymd(const CivilDate& d) {
  return chr::year{d.year} / chr::month{d.month} / chr::day{d.day};
}

std::string compact(chr::year_month_day d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::string month_template(chr::year_month ym) {
  return std::string("Month: ") + kMonths[static_cast<unsigned>(ym.month()) - 1] +
         ", Year: " + std::to_string(static_cast<int>(ym.year()));
}

std::string shift_days(const CivilDate& ref, int n) {
  return compact(chr::year_month_day{chr::sys_days(ymd(ref)) + chr::days(n)});
}

std::string shift_months(const CivilDate& ref, int n) {
  auto ym = chr::year{ref.year} / chr::month{ref.month} + chr::months(n);
  return month_template(ym);
}

std::string week_of(const CivilDate& ref, int n) {
  chr::sys_days day(ymd(ref));
  chr::weekday wd(day);
  chr::sys_days monday = day - chr::days((wd.iso_encoding() - 1)) + chr::days(7 * n);
  chr::year_month_day m(monday);
  return month_template(m.year() / m.month());
}

std::string normalized(std::string_view q, const CivilDate& ref) { return normalize_query(q, ref).normalized; }

const CivilDate kRef{2021, 6, 15};

TEST(DatetimeNormalizer, ExactDates) {
  EXPECT_EQ(normalized("sales on 2021-06-05", kRef), "sales on 20210605");
  EXPECT_EQ(normalized("orders placed 05/06/2021", kRef), "orders placed 20210605");
  EXPECT_EQ(normalized("quakes on 4th October 2020", kRef), "quakes on 20201004");
  EXPECT_EQ(normalized("revenue on March 3, 2019", kRef), "revenue on 20190303");
  EXPECT_EQ(normalized("May 5 2020 sales", kRef), "20200505 sales");
}

TEST(DatetimeNormalizer, MonthYearAndYearOnly) {
  EXPECT_EQ(normalized("customers who joined in June 2021", kRef),
            "customers who joined in Month: June, Year: 2021");
  EXPECT_EQ(normalized("sales for Sept 2020", kRef), "sales for Month: September, Year: 2020");
  EXPECT_EQ(normalized("orders from Jan, 2022", kRef), "orders from Month: January, Year: 2022");
  EXPECT_EQ(normalized("matches played in 2019", kRef), "matches played in Year: 2019");
  EXPECT_EQ(normalized("revenue for the year 2018", kRef), "revenue for the Year: 2018");
}

TEST(DatetimeNormalizer, LeavesNonDatesAlone) {
  for (const char* q : {"may I see the top 10 customers", "show 2021 rows", "customers with id 20210605x",
                        "which brand has the most customers"}) {
    auto n = normalize_query(q, kRef);
    EXPECT_EQ(n.normalized, q);
    EXPECT_TRUE(n.substitutions.empty()) << q;
  }
  EXPECT_EQ(normalized("sales on 2021-02-30", kRef), "sales on 2021-02-30");
}

TEST(DatetimeNormalizer, SpansAreSortedAndRecordResolvedParts) {
  auto n = normalize_query("from 1 March 2020 to 2020-04-30 in 2021", kRef);
  ASSERT_EQ(n.substitutions.size(), 3u);
  EXPECT_EQ(n.substitutions[0].replacement, "20200301");
  EXPECT_EQ(n.substitutions[1].replacement, "20200430");
  EXPECT_EQ(n.substitutions[2].replacement, "Year: 2021");
  EXPECT_EQ(n.substitutions[2].span.kind, TemporalKind::YearOnly);
  EXPECT_EQ(n.substitutions[0].span.resolved.month, 3u);
  EXPECT_EQ(n.normalized, "from 20200301 to 20200430 in Year: 2021");
}

class RelativeForms : public ::testing::TestWithParam<CivilDate> {};

TEST_P(RelativeForms, ResolveAgainstReference) {
  const CivilDate ref = GetParam();
  EXPECT_EQ(normalized("what did we sell yesterday", ref), "what did we sell " + shift_days(ref, -1));
  EXPECT_EQ(normalized("orders placed today", ref), "orders placed " + shift_days(ref, 0));
  EXPECT_EQ(normalized("deliveries due tomorrow", ref), "deliveries due " + shift_days(ref, 1));
  EXPECT_EQ(normalized("returns from last day", ref), "returns from " + shift_days(ref, -1));
  EXPECT_EQ(normalized("revenue last month", ref), "revenue " + shift_months(ref, -1));
  EXPECT_EQ(normalized("sales this month", ref), "sales " + shift_months(ref, 0));
  EXPECT_EQ(normalized("bookings next month", ref), "bookings " + shift_months(ref, 1));
  EXPECT_EQ(normalized("signups this week", ref), "signups " + week_of(ref, 0));
  EXPECT_EQ(normalized("customers acquired last year", ref),
            "customers acquired Year: " + std::to_string(ref.year - 1));
  EXPECT_EQ(normalized("targets for next year", ref), "targets for Year: " + std::to_string(ref.year + 1));
  EXPECT_EQ(normalized("quakes on 12 Dec", ref), "quakes on " + std::to_string(ref.year) + "1212");
}

INSTANTIATE_TEST_SUITE_P(ReferenceTimes, RelativeForms,
                         ::testing::Values(CivilDate{2021, 6, 15}, CivilDate{2020, 1, 1},
                                           CivilDate{2024, 3, 1}));

}  // namespace
}  // namespace askdb
