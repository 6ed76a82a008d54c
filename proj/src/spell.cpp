#include "askdb/spell.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "askdb/error.hpp"
#include "askdb/text.hpp"

namespace askdb {

std::optional<std::size_t> bounded_edit_distance(std::string_view a, std::string_view b,
                                                 std::size_t max_distance) {
  if (a.size() > b.size()) std::swap(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (m - n > max_distance) return std::nullopt;
  if (n == 0) return m;

  constexpr std::size_t kInf = static_cast<std::size_t>(-1) / 2;
  std::vector<std::size_t> prev(n + 1, kInf), cur(n + 1, kInf);
  for (std::size_t i = 0; i <= std::min(n, max_distance); ++i) prev[i] = i;

  // Rows walk the longer string; columns are clamped to the band |i - j| <= max.
  for (std::size_t j = 1; j <= m; ++j) {
    std::size_t lo = j > max_distance ? j - max_distance : 0;
    std::size_t hi = std::min(n, j + max_distance);
    std::fill(cur.begin(), cur.end(), kInf);
    if (lo == 0) cur[0] = j;
    std::size_t row_min = lo == 0 ? cur[0] : kInf;
    for (std::size_t i = std::max<std::size_t>(lo, 1); i <= hi; ++i) {
      std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      std::size_t best = prev[i - 1] + cost;
      best = std::min(best, prev[i] + 1);
      best = std::min(best, cur[i - 1] + 1);
      cur[i] = best;
      row_min = std::min(row_min, best);
    }
    if (row_min > max_distance) return std::nullopt;
    std::swap(prev, cur);
  }
  if (prev[n] > max_distance) return std::nullopt;
  return prev[n];
}

std::size_t correction_threshold(std::size_t token_length) { return token_length <= 4 ? 1 : 2; }

WordIndex::WordIndex(const std::vector<std::string>& words) {
  for (const auto& w : words) add(w);
}

void WordIndex::add(std::string word) {
  if (word.empty() || !all_.insert(word).second) return;
  if (by_length_.size() <= word.size()) by_length_.resize(word.size() + 1);
  by_length_[word.size()].push_back(std::move(word));
}

bool WordIndex::contains(std::string_view word) const { return all_.count(std::string(word)) > 0; }

std::vector<WordIndex::Hit> WordIndex::within(std::string_view token,
                                              std::size_t max_distance) const {
  std::vector<Hit> out;
  std::size_t lo = token.size() > max_distance ? token.size() - max_distance : 1;
  std::size_t hi = token.size() + max_distance;
  for (std::size_t len = lo; len <= hi && len < by_length_.size(); ++len) {
    for (const auto& w : by_length_[len]) {
      if (auto d = bounded_edit_distance(token, w, max_distance)) out.push_back({w, *d});
    }
  }
  return out;
}

Lexicon Lexicon::from_lists(const std::vector<std::string>& english,
                            const std::vector<std::string>& stopwords) {
  Lexicon lex;
  for (const auto& w : english) lex.english.add(text::to_lower(text::trim(w)));
  for (const auto& w : stopwords) {
    auto t = text::to_lower(text::trim(w));
    if (!t.empty()) lex.stopwords.insert(t);
  }
  return lex;
}

Lexicon Lexicon::load(const std::string& data_dir) {
  return from_lists(read_word_list(data_dir + "/lexicon/english_words.txt"),
                    read_word_list(data_dir + "/lexicon/stopwords.txt"));
}

std::vector<std::string> read_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot read word list '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (!t.empty() && t[0] != '#') out.push_back(t);
  }
  return out;
}

std::string default_data_dir() {
  if (const char* env = std::getenv("ASKDB_DATA_DIR"); env && *env) return env;
  return ASKDB_DEFAULT_DATA_DIR;
}

Correction correct_token(std::string_view token, const WordIndex& english,
                         const WordIndex& column_tokens) {
  Correction c{std::string(token), std::string(token), 0, false};
  if (token.empty()) return c;
  if (std::all_of(token.begin(), token.end(), [](char ch) { return text::is_digit(ch); })) {
    return c;
  }
  if (column_tokens.contains(token)) {
    c.from_column = true;
    return c;
  }
  if (english.contains(token)) return c;

  const std::size_t limit = correction_threshold(token.size());
  std::optional<Correction> best;
  auto consider = [&](const WordIndex::Hit& h, bool from_column) {
    if (!best || h.distance < best->distance ||
        (h.distance == best->distance && from_column && !best->from_column) ||
        (h.distance == best->distance && from_column == best->from_column &&
         h.word < best->corrected)) {
      best = Correction{std::string(token), h.word, h.distance, from_column};
    }
  };
  for (const auto& h : column_tokens.within(token, limit)) consider(h, true);
  for (const auto& h : english.within(token, limit)) consider(h, false);
  return best ? *best : c;
}

}  // namespace askdb
