#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "askdb/calendar.hpp"

namespace askdb {

enum class TemporalKind { ExactDate, MonthYear, YearOnly, Relative };

std::string_view to_string(TemporalKind k);

struct ResolvedTime {
  int year = 0;
  std::optional<unsigned> month;
  std::optional<unsigned> day;

  friend bool operator==(const ResolvedTime&, const ResolvedTime&) = default;
};

struct TemporalSpan {
  std::size_t start = 0;  // byte offsets into the raw query, [start, end)
  std::size_t end = 0;
  TemporalKind kind = TemporalKind::ExactDate;
  ResolvedTime resolved;

  friend bool operator==(const TemporalSpan&, const TemporalSpan&) = default;
};

struct Substitution {
  TemporalSpan span;
  std::string replacement;
};

struct NormalizedQuery {
  std::string original;
  std::string normalized;
  // Non-overlapping, sorted by span.start.
  std::vector<Substitution> substitutions;
};

// Finds dates in English text: numeric literals (yyyy-mm-dd, dd/mm/yyyy),
// "<ordinal> <Month> [year]", "<Month> <day>[, year]", "<Month>[,] <year>",
// "year <yyyy>", four-digit years after a temporal cue word, and relative
// forms (yesterday, today, tomorrow, last/this/next day|week|month|year)
// resolved against reference.
std::vector<TemporalSpan> recognize_temporal(std::string_view query, const CivilDate& reference);

// Replacement text for a span: yyyymmdd when a day is known,
// "Month: <Name>, Year: <yyyy>" when only the month is, else "Year: <yyyy>".
std::string render_temporal(const ResolvedTime& t);

NormalizedQuery normalize_query(std::string_view query, const CivilDate& reference);

}  // namespace askdb
