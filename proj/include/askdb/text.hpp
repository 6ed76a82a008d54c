#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace askdb::text {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_icase(std::string_view s, std::string_view prefix);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Lowercases and replaces every non-alphanumeric byte with a space, then
// splits on whitespace. Used wherever query text and cell values are compared.
std::vector<std::string> clean_tokens(std::string_view s);
std::string clean_text(std::string_view s);

bool is_alnum(char c);
bool is_digit(char c);
bool is_space(char c);

}  // namespace askdb::text
