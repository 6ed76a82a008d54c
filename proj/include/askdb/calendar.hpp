#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace askdb {

struct CivilDate {
  int year = 1970;
  unsigned month = 1;  // 1-12
  unsigned day = 1;    // 1-31

  friend bool operator==(const CivilDate&, const CivilDate&) = default;
  friend auto operator<=>(const CivilDate&, const CivilDate&) = default;
};

namespace calendar {

bool is_valid(int year, unsigned month, unsigned day);
unsigned days_in_month(int year, unsigned month);
CivilDate add_days(const CivilDate& d, int days);
// Moves by whole months, keeping the day clamped to the target month length.
CivilDate add_months(const CivilDate& d, int months);
// 1 = Monday ... 7 = Sunday.
unsigned iso_weekday(const CivilDate& d);

std::string_view month_name_long(unsigned month);
std::string_view month_name_short(unsigned month);
// Accepts long names and common abbreviations ("Sept" included), any case.
std::optional<unsigned> month_from_name(std::string_view name);

// yyyymmdd
std::string to_compact(const CivilDate& d);
// yyyy-mm-dd
std::string to_iso(const CivilDate& d);
std::optional<CivilDate> parse_iso(std::string_view s);

}  // namespace calendar

// Pattern over the tokens yyyy, mm, dd and literal separators, e.g.
// "yyyy-mm-dd", "dd/mm/yyyy", "yyyymmdd". Two-digit years are rejected.
class DateFormat {
 public:
  // Throws OnboardingError on an invalid pattern.
  static DateFormat compile(std::string_view pattern);

  std::optional<CivilDate> parse(std::string_view value) const;
  std::string format(const CivilDate& d) const;
  const std::string& pattern() const noexcept { return pattern_; }

 private:
  enum class Part { Year, Month, Day, Literal };
  struct Piece {
    Part part;
    std::string literal;
  };

  std::string pattern_;
  std::vector<Piece> pieces_;
};

}  // namespace askdb
