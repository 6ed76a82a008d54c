#include "askdb/number_words.hpp"

#include <array>
#include <optional>

#include "askdb/text.hpp"

namespace askdb {

namespace {

constexpr std::array<std::string_view, 20> kUnits = {
    "zero",    "one",     "two",       "three",    "four",     "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen"};
constexpr std::array<std::string_view, 10> kTens = {"",      "",      "twenty",  "thirty", "forty",
                                                    "fifty", "sixty", "seventy", "eighty", "ninety"};

std::optional<int> unit_value(std::string_view w) {
  for (std::size_t i = 0; i < kUnits.size(); ++i) {
    if (w == kUnits[i]) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> tens_value(std::string_view w) {
  for (std::size_t i = 2; i < kTens.size(); ++i) {
    if (w == kTens[i]) return static_cast<int>(i) * 10;
  }
  return std::nullopt;
}

struct Word {
  std::size_t start;
  std::size_t end;
  std::string lower;
};

// Words are maximal alphabetic runs; a hyphen between two number words is
// part of the number ("twenty-one").
std::vector<Word> words_of(std::string_view s) {
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::isalpha(static_cast<unsigned char>(s[i]))) {
      std::size_t b = i;
      while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({b, i, text::to_lower(s.substr(b, i - b))});
    } else {
      ++i;
    }
  }
  return out;
}

// ",ddd" not followed by another digit.
bool thousands_group(std::string_view s, std::size_t comma) {
  if (s[comma] != ',' || comma + 3 >= s.size()) return false;
  for (std::size_t k = 1; k <= 3; ++k) {
    if (!text::is_digit(s[comma + k])) return false;
  }
  return comma + 4 >= s.size() || !text::is_digit(s[comma + 4]);
}

// Only whitespace or a single hyphen may separate the words of one number.
bool joinable(std::string_view s, std::size_t from, std::size_t to) {
  std::string_view gap = s.substr(from, to - from);
  if (gap == "-") return true;
  if (gap.empty()) return false;
  for (char c : gap) {
    if (!text::is_space(c)) return false;
  }
  return true;
}

}  // namespace

std::string words_to_numbers(std::string_view s) {
  enum class Last { None, Unit, Tens, Hundred, Thousand };
  auto words = words_of(s);
  std::string out;
  std::size_t cursor = 0;
  std::size_t i = 0;
  while (i < words.size()) {
    if (!unit_value(words[i].lower) && !tens_value(words[i].lower)) {
      ++i;
      continue;
    }
    long total = 0;    // completed thousands
    long current = 0;  // part below one thousand
    Last last = Last::None;
    std::size_t end_word = i;
    for (std::size_t j = i; j < words.size(); ++j) {
      if (j > i && !joinable(s, words[j - 1].end, words[j].start)) break;
      const std::string& w = words[j].lower;
      if (w == "and") {
        // "three hundred and five", "two thousand and ten"
        bool bridge = (last == Last::Hundred || last == Last::Thousand) &&
                      j + 1 < words.size() &&
                      joinable(s, words[j].end, words[j + 1].start) &&
                      (unit_value(words[j + 1].lower) || tens_value(words[j + 1].lower));
        if (!bridge) break;
        continue;
      }
      if (auto u = unit_value(w)) {
        if (*u == 0) {
          if (last != Last::None) break;
          end_word = j;
          break;
        }
        bool ok = last == Last::None || last == Last::Hundred || last == Last::Thousand ||
                  (last == Last::Tens && *u < 10);
        if (!ok) break;
        current += *u;
        last = Last::Unit;
      } else if (auto t = tens_value(w)) {
        if (!(last == Last::None || last == Last::Hundred || last == Last::Thousand)) break;
        current += *t;
        last = Last::Tens;
      } else if (w == "hundred") {
        if (!(last == Last::Unit && current >= 1 && current <= 9)) break;
        current *= 100;
        last = Last::Hundred;
      } else if (w == "thousand") {
        if (last == Last::None || last == Last::Thousand || total > 0 || current == 0) break;
        total = current * 1000;
        current = 0;
        last = Last::Thousand;
      } else {
        break;
      }
      end_word = j;
    }
    out.append(s.substr(cursor, words[i].start - cursor));
    out.append(std::to_string(total + current));
    cursor = words[end_word].end;
    i = end_word + 1;
  }
  out.append(s.substr(cursor));
  return out;
}

std::vector<Numeral> extract_numerals(
    std::string_view s, const std::vector<std::pair<std::size_t, std::size_t>>& skip) {
  auto skipped = [&](std::size_t pos) {
    for (auto [b, e] : skip) {
      if (pos >= b && pos < e) return true;
    }
    return false;
  };
  std::vector<Numeral> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!text::is_digit(s[i]) || skipped(i)) {
      ++i;
      continue;
    }
    if (i > 0 && (std::isalpha(static_cast<unsigned char>(s[i - 1])) || s[i - 1] == '_')) {
      // Digits inside a word ("covid19") are not numerals.
      while (i < s.size() && (text::is_alnum(s[i]) || s[i] == '_')) ++i;
      continue;
    }
    std::size_t start = i;
    bool negative = i > 0 && s[i - 1] == '-' &&
                    (i == 1 || !text::is_alnum(s[i - 2]));
    std::string digits;
    while (i < s.size()) {
      if (text::is_digit(s[i])) {
        digits.push_back(s[i++]);
      } else if (thousands_group(s, i)) {
        i += 1;  // thousands separator
      } else {
        break;
      }
    }
    if (i + 1 < s.size() && s[i] == '.' && text::is_digit(s[i + 1])) {
      digits.push_back('.');
      ++i;
      while (i < s.size() && text::is_digit(s[i])) digits.push_back(s[i++]);
    }
    // Skip ordinal suffixes; any other trailing letters make it a word, not a number.
    std::size_t k = i;
    while (k < s.size() && std::isalpha(static_cast<unsigned char>(s[k]))) ++k;
    std::string suffix = text::to_lower(s.substr(i, k - i));
    if (!suffix.empty() && suffix != "st" && suffix != "nd" && suffix != "rd" &&
        suffix != "th") {
      i = k;
      continue;
    }
    i = k;
    out.push_back({(negative ? "-" : "") + digits, negative ? start - 1 : start});
  }
  return out;
}

}  // namespace askdb
