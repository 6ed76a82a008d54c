#include "askdb/datetime_normalizer.hpp"

#include <algorithm>
#include <regex>

#include "askdb/text.hpp"

namespace askdb {

std::string_view to_string(TemporalKind k) {
  switch (k) {
    case TemporalKind::ExactDate:
      return "exact_date";
    case TemporalKind::MonthYear:
      return "month_year";
    case TemporalKind::YearOnly:
      return "year_only";
    case TemporalKind::Relative:
      return "relative";
  }
  return "exact_date";
}

namespace {

constexpr const char* kMonth =
    "(january|february|march|april|may|june|july|august|september|october|november|december|"
    "sept|jan|feb|mar|apr|jun|jul|aug|sep|oct|nov|dec)";

struct Patterns {
  std::regex iso{R"(\b(\d{4})[-/](\d{1,2})[-/](\d{1,2})\b)"};
  std::regex dmy{R"(\b(\d{1,2})[/.-](\d{1,2})[/.-](\d{4})\b)"};
  std::regex day_month{std::string(R"(\b(\d{1,2})(?:st|nd|rd|th)?\s+(?:of\s+)?)") + kMonth +
                           R"(\b(?:,?\s+(\d{4})\b)?)",
                       std::regex::icase};
  std::regex month_day{std::string(R"(\b)") + kMonth +
                           R"(\.?\s+(\d{1,2})(?:st|nd|rd|th)?\b(?:,?\s+(\d{4})\b)?)",
                       std::regex::icase};
  std::regex month_year{std::string(R"(\b)") + kMonth + R"(\.?(?:\s*,\s*|\s+)(\d{4})\b)",
                        std::regex::icase};
  std::regex year_word{R"(\byear\s+(\d{4})\b)", std::regex::icase};
  std::regex cue_year{R"(\b(?:in|during|since|before|after|until|through)\s+(\d{4})\b)",
                      std::regex::icase};
  std::regex relative_word{R"(\b(yesterday|today|tomorrow)\b)", std::regex::icase};
  std::regex relative_unit{R"(\b(last|this|next)\s+(day|week|month|year)\b)", std::regex::icase};
};

const Patterns& patterns() {
  static const Patterns p;
  return p;
}

int to_int(const std::ssub_match& m) { return std::stoi(m.str()); }

struct Candidate {
  TemporalSpan span;
  int priority = 0;  // lower wins among equal-length overlaps
};

template <typename F>
void scan(std::string_view query, const std::regex& re, F&& on_match) {
  std::string s(query);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
    on_match(*it);
  }
}

bool plausible_year(int y) { return y >= 1900 && y <= 2099; }

}  // namespace

std::vector<TemporalSpan> recognize_temporal(std::string_view query, const CivilDate& reference) {
  const Patterns& p = patterns();
  std::vector<Candidate> found;
  auto add = [&](const std::smatch& m, std::size_t group_start, std::size_t group_end,
                 TemporalKind kind, ResolvedTime t, int priority) {
    (void)group_end;
    TemporalSpan span;
    span.start = static_cast<std::size_t>(m.position(group_start));
    span.end = static_cast<std::size_t>(m.position(0) + m.length(0));
    span.kind = kind;
    span.resolved = t;
    found.push_back({span, priority});
  };
  auto exact = [&](const std::smatch& m, int y, int mo, int d, int priority) {
    if (!calendar::is_valid(y, static_cast<unsigned>(mo), static_cast<unsigned>(d))) return;
    add(m, 0, 0, TemporalKind::ExactDate,
        {y, static_cast<unsigned>(mo), static_cast<unsigned>(d)}, priority);
  };

  scan(query, p.iso, [&](const std::smatch& m) {
    exact(m, to_int(m[1]), to_int(m[2]), to_int(m[3]), 0);
  });
  scan(query, p.dmy, [&](const std::smatch& m) {
    exact(m, to_int(m[3]), to_int(m[2]), to_int(m[1]), 0);
  });
  scan(query, p.day_month, [&](const std::smatch& m) {
    auto month = calendar::month_from_name(m[2].str());
    int year = m[3].matched ? to_int(m[3]) : reference.year;
    if (month) exact(m, year, static_cast<int>(*month), to_int(m[1]), 1);
  });
  scan(query, p.month_day, [&](const std::smatch& m) {
    auto month = calendar::month_from_name(m[1].str());
    int year = m[3].matched ? to_int(m[3]) : reference.year;
    // "may 5" without a year is too often the modal verb; require a year.
    if (!m[3].matched && text::iequals(m[1].str(), "may")) return;
    if (month) exact(m, year, static_cast<int>(*month), to_int(m[2]), 1);
  });
  scan(query, p.month_year, [&](const std::smatch& m) {
    auto month = calendar::month_from_name(m[1].str());
    int year = to_int(m[2]);
    if (month) add(m, 0, 0, TemporalKind::MonthYear, {year, *month, std::nullopt}, 2);
  });
  scan(query, p.year_word, [&](const std::smatch& m) {
    int year = to_int(m[1]);
    if (plausible_year(year)) add(m, 0, 0, TemporalKind::YearOnly, {year, {}, {}}, 3);
  });
  scan(query, p.cue_year, [&](const std::smatch& m) {
    int year = to_int(m[1]);
    if (plausible_year(year)) add(m, 1, 1, TemporalKind::YearOnly, {year, {}, {}}, 4);
  });
  scan(query, p.relative_word, [&](const std::smatch& m) {
    std::string w = text::to_lower(m[1].str());
    int delta = w == "yesterday" ? -1 : (w == "tomorrow" ? 1 : 0);
    CivilDate d = calendar::add_days(reference, delta);
    add(m, 0, 0, TemporalKind::Relative, {d.year, d.month, d.day}, 1);
  });
  scan(query, p.relative_unit, [&](const std::smatch& m) {
    std::string which = text::to_lower(m[1].str());
    std::string unit = text::to_lower(m[2].str());
    int delta = which == "last" ? -1 : (which == "next" ? 1 : 0);
    ResolvedTime t;
    if (unit == "day") {
      CivilDate d = calendar::add_days(reference, delta);
      t = {d.year, d.month, d.day};
    } else if (unit == "week") {
      // Weeks start on Monday; the week is reported by the month of its start.
      CivilDate monday =
          calendar::add_days(reference, 1 - static_cast<int>(calendar::iso_weekday(reference)));
      CivilDate start = calendar::add_days(monday, 7 * delta);
      t = {start.year, start.month, std::nullopt};
    } else if (unit == "month") {
      CivilDate d = calendar::add_months({reference.year, reference.month, 1}, delta);
      t = {d.year, d.month, std::nullopt};
    } else {
      t = {reference.year + delta, std::nullopt, std::nullopt};
    }
    add(m, 0, 0, TemporalKind::Relative, t, 1);
  });

  // Keep maximal spans: longest first, then earliest, then by priority.
  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
    std::size_t la = a.span.end - a.span.start;
    std::size_t lb = b.span.end - b.span.start;
    if (la != lb) return la > lb;
    if (a.span.start != b.span.start) return a.span.start < b.span.start;
    return a.priority < b.priority;
  });
  std::vector<TemporalSpan> chosen;
  for (const auto& c : found) {
    bool overlaps = std::any_of(chosen.begin(), chosen.end(), [&](const TemporalSpan& s) {
      return c.span.start < s.end && s.start < c.span.end;
    });
    if (!overlaps) chosen.push_back(c.span);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const TemporalSpan& a, const TemporalSpan& b) { return a.start < b.start; });
  return chosen;
}

std::string render_temporal(const ResolvedTime& t) {
  if (t.month && t.day) return calendar::to_compact({t.year, *t.month, *t.day});
  std::string year = std::to_string(t.year);
  if (t.month) {
    return "Month: " + std::string(calendar::month_name_long(*t.month)) + ", Year: " + year;
  }
  return "Year: " + year;
}

NormalizedQuery normalize_query(std::string_view query, const CivilDate& reference) {
  NormalizedQuery out;
  out.original = std::string(query);
  std::size_t cursor = 0;
  for (const auto& span : recognize_temporal(query, reference)) {
    out.normalized.append(query.substr(cursor, span.start - cursor));
    std::string replacement = render_temporal(span.resolved);
    out.normalized.append(replacement);
    out.substitutions.push_back({span, std::move(replacement)});
    cursor = span.end;
  }
  out.normalized.append(query.substr(cursor));
  return out;
}

}  // namespace askdb
