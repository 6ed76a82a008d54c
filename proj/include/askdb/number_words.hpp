#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace askdb {

// Rewrites English number words as digits: "at least two times" ->
// "at least 2 times", "twenty-one" -> "21", "three hundred and five" -> "305".
// Handles zero up to 999,999; all other text is copied unchanged.
std::string words_to_numbers(std::string_view text);

struct Numeral {
  std::string text;       // digits as they should appear in SQL, e.g. "2", "-3.5"
  std::size_t position;   // byte offset in the scanned text
};

// Numerals in textual order. Thousands separators are dropped and ordinal
// suffixes ("4th") ignored. Characters inside any of the skip ranges
// [first, second) are not scanned.
std::vector<Numeral> extract_numerals(
    std::string_view text,
    const std::vector<std::pair<std::size_t, std::size_t>>& skip = {});

}  // namespace askdb
