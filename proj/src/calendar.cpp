#include "askdb/calendar.hpp"

#include <array>
#include <chrono>

#include "askdb/error.hpp"
#include "askdb/text.hpp"

namespace askdb {

namespace calendar {

namespace {

constexpr std::array<std::string_view, 12> kLongNames = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

constexpr std::array<std::string_view, 12> kShortNames = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

std::chrono::sys_days to_sys(const CivilDate& d) {
  return std::chrono::sys_days{std::chrono::year{d.year} / std::chrono::month{d.month} /
                               std::chrono::day{d.day}};
}

CivilDate from_sys(std::chrono::sys_days s) {
  std::chrono::year_month_day ymd{s};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day())};
}

std::string pad(long v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

bool is_valid(int year, unsigned month, unsigned day) {
  if (year < 1 || year > 9999) return false;
  return std::chrono::year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                     std::chrono::day{day}}
      .ok();
}

unsigned days_in_month(int year, unsigned month) {
  std::chrono::year_month_day_last last{std::chrono::year{year},
                                        std::chrono::month_day_last{std::chrono::month{month}}};
  return static_cast<unsigned>(last.day());
}

CivilDate add_days(const CivilDate& d, int days) {
  return from_sys(to_sys(d) + std::chrono::days{days});
}

CivilDate add_months(const CivilDate& d, int months) {
  int index = d.year * 12 + static_cast<int>(d.month) - 1 + months;
  CivilDate out;
  out.year = index / 12;
  out.month = static_cast<unsigned>(index % 12) + 1;
  out.day = std::min(d.day, days_in_month(out.year, out.month));
  return out;
}

unsigned iso_weekday(const CivilDate& d) {
  return std::chrono::weekday{to_sys(d)}.iso_encoding();
}

std::string_view month_name_long(unsigned month) { return kLongNames.at(month - 1); }
std::string_view month_name_short(unsigned month) { return kShortNames.at(month - 1); }

std::optional<unsigned> month_from_name(std::string_view name) {
  std::string lower = text::to_lower(name);
  if (lower.size() >= 3) {
    for (unsigned m = 1; m <= 12; ++m) {
      std::string full = text::to_lower(kLongNames[m - 1]);
      if (lower == full || lower == full.substr(0, 3)) return m;
    }
  }
  if (lower == "sept") return 9;
  return std::nullopt;
}

std::string to_compact(const CivilDate& d) {
  return pad(d.year, 4) + pad(d.month, 2) + pad(d.day, 2);
}

std::string to_iso(const CivilDate& d) {
  return pad(d.year, 4) + "-" + pad(d.month, 2) + "-" + pad(d.day, 2);
}

std::optional<CivilDate> parse_iso(std::string_view s) {
  static const DateFormat iso = DateFormat::compile("yyyy-mm-dd");
  return iso.parse(s);
}

}  // namespace calendar

DateFormat DateFormat::compile(std::string_view pattern) {
  DateFormat f;
  f.pattern_ = std::string(pattern);
  bool seen_year = false, seen_month = false, seen_day = false;
  std::size_t i = 0;
  auto lower = text::to_lower(pattern);
  while (i < lower.size()) {
    std::string_view rest = std::string_view(lower).substr(i);
    if (rest.substr(0, 4) == "yyyy") {
      if (seen_year) throw OnboardingError("date format repeats yyyy: " + f.pattern_);
      f.pieces_.push_back({Part::Year, {}});
      seen_year = true;
      i += 4;
    } else if (rest.substr(0, 2) == "yy") {
      throw OnboardingError("two-digit years are not supported: " + f.pattern_);
    } else if (rest.substr(0, 2) == "mm") {
      if (seen_month) throw OnboardingError("date format repeats mm: " + f.pattern_);
      f.pieces_.push_back({Part::Month, {}});
      seen_month = true;
      i += 2;
    } else if (rest.substr(0, 2) == "dd") {
      if (seen_day) throw OnboardingError("date format repeats dd: " + f.pattern_);
      f.pieces_.push_back({Part::Day, {}});
      seen_day = true;
      i += 2;
    } else if (text::is_alnum(rest[0])) {
      throw OnboardingError("unknown token in date format: " + f.pattern_);
    } else {
      if (!f.pieces_.empty() && f.pieces_.back().part == Part::Literal) {
        f.pieces_.back().literal.push_back(pattern[i]);
      } else {
        f.pieces_.push_back({Part::Literal, std::string(1, pattern[i])});
      }
      ++i;
    }
  }
  if (!seen_year || !seen_month || !seen_day) {
    throw OnboardingError("date format must contain yyyy, mm and dd: " + f.pattern_);
  }
  return f;
}

std::optional<CivilDate> DateFormat::parse(std::string_view value) const {
  int year = 0;
  unsigned month = 0, day = 0;
  std::size_t pos = 0;
  // In a compact pattern (yyyymmdd) every field has its full width.
  bool compact = false;
  for (std::size_t p = 0; p + 1 < pieces_.size(); ++p) {
    compact = compact || (pieces_[p].part != Part::Literal && pieces_[p + 1].part != Part::Literal);
  }
  for (std::size_t p = 0; p < pieces_.size(); ++p) {
    const Piece& piece = pieces_[p];
    if (piece.part == Part::Literal) {
      if (value.substr(pos, piece.literal.size()) != piece.literal) return std::nullopt;
      pos += piece.literal.size();
      continue;
    }
    // Otherwise month and day accept one or two digits.
    bool bounded = !compact;
    std::size_t min_w = piece.part == Part::Year ? 4 : (bounded ? 1 : 2);
    std::size_t max_w = piece.part == Part::Year ? 4 : 2;
    std::size_t n = 0;
    while (n < max_w && pos + n < value.size() && text::is_digit(value[pos + n])) ++n;
    if (n < min_w) return std::nullopt;
    unsigned v = 0;
    for (std::size_t k = 0; k < n; ++k) v = v * 10 + static_cast<unsigned>(value[pos + k] - '0');
    pos += n;
    if (piece.part == Part::Year) year = static_cast<int>(v);
    if (piece.part == Part::Month) month = v;
    if (piece.part == Part::Day) day = v;
  }
  if (pos != value.size()) return std::nullopt;
  if (!calendar::is_valid(year, month, day)) return std::nullopt;
  return CivilDate{year, month, day};
}

std::string DateFormat::format(const CivilDate& d) const {
  std::string out;
  auto pad2 = [](unsigned v) { return (v < 10 ? "0" : "") + std::to_string(v); };
  for (const auto& piece : pieces_) {
    switch (piece.part) {
      case Part::Year: {
        std::string y = std::to_string(d.year);
        while (y.size() < 4) y.insert(y.begin(), '0');
        out += y;
        break;
      }
      case Part::Month:
        out += pad2(d.month);
        break;
      case Part::Day:
        out += pad2(d.day);
        break;
      case Part::Literal:
        out += piece.literal;
        break;
    }
  }
  return out;
}

}  // namespace askdb
