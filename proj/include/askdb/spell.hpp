#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace askdb {

// Levenshtein distance, or nullopt once it provably exceeds max_distance.
// Only the diagonal band of width 2*max_distance+1 is evaluated.
std::optional<std::size_t> bounded_edit_distance(std::string_view a, std::string_view b,
                                                 std::size_t max_distance);

// Largest distance a correction may have: 1 for tokens of up to four
// characters, 2 otherwise.
std::size_t correction_threshold(std::size_t token_length);

// Words bucketed by length so a lookup only visits lengths within reach.
class WordIndex {
 public:
  WordIndex() = default;
  explicit WordIndex(const std::vector<std::string>& words);

  void add(std::string word);
  bool contains(std::string_view word) const;
  std::size_t size() const { return all_.size(); }

  struct Hit {
    std::string word;
    std::size_t distance;
  };
  // Every word whose distance to token is at most max_distance.
  std::vector<Hit> within(std::string_view token, std::size_t max_distance) const;

 private:
  std::vector<std::vector<std::string>> by_length_;
  std::unordered_set<std::string> all_;
};

struct Lexicon {
  WordIndex english;
  std::unordered_set<std::string> stopwords;

  // Reads english_words.txt and stopwords.txt (one token per line, UTF-8)
  // from dir/lexicon.
  static Lexicon load(const std::string& data_dir);
  static Lexicon from_lists(const std::vector<std::string>& english,
                            const std::vector<std::string>& stopwords);
  bool is_stopword(std::string_view w) const { return stopwords.count(std::string(w)) > 0; }
};

struct Correction {
  std::string token;
  std::string corrected;
  std::size_t distance = 0;
  bool from_column = false;
};

// Corrects a cleaned query token against the English wordlist and the tokens
// of one column's values. The minimum-distance candidate wins if it is within
// correction_threshold; ties prefer column tokens, then lexicographic order.
// Tokens already present in either set, and numerals, are left unchanged.
Correction correct_token(std::string_view token, const WordIndex& english,
                         const WordIndex& column_tokens);

std::vector<std::string> read_word_list(const std::string& path);
std::string default_data_dir();

}  // namespace askdb
