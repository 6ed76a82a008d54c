#include "askdb/spell.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

namespace askdb {
namespace {

TEST(BoundedEditDistance, MatchesFullMatrixWithinBound) {
  std::mt19937 rng(1);
  const std::string alphabet = "abcde";
  for (int i = 0; i < 20000; ++i) {
    std::string a, b;
    for (std::size_t k = rng() % 9; k > 0; --k) a += alphabet[rng() % alphabet.size()];
    for (std::size_t k = rng() % 9; k > 0; --k) b += alphabet[rng() % alphabet.size()];
    std::size_t max = rng() % 4;
    std::size_t full = oracle::levenshtein(a, b);
    auto bounded = bounded_edit_distance(a, b, max);
    if (full <= max) {
      ASSERT_EQ(bounded, full) << a << " " << b;
    } else {
      ASSERT_FALSE(bounded.has_value()) << a << " " << b << " " << max;
    }
  }
}

TEST(BoundedEditDistance, Examples) {
  EXPECT_EQ(bounded_edit_distance("jhonny", "johnny", 2), 2u);
  EXPECT_EQ(bounded_edit_distance("kitten", "sitting", 3), 3u);
  EXPECT_FALSE(bounded_edit_distance("kitten", "sitting", 2));
  EXPECT_EQ(bounded_edit_distance("", "abc", 3), 3u);
}

TEST(CorrectionThreshold, ByLength) {
  EXPECT_EQ(correction_threshold(3), 1u);
  EXPECT_EQ(correction_threshold(4), 1u);
  EXPECT_EQ(correction_threshold(5), 2u);
}

TEST(WordIndex, WithinFindsEveryWordInReach) {
  WordIndex idx({"cat", "cart", "carts", "dog", "cast"});
  auto hits = idx.within("cat", 1);
  std::set<std::string> words;
  for (const auto& h : hits) words.insert(h.word);
  EXPECT_EQ(words, (std::set<std::string>{"cat", "cart", "cast"}));
  EXPECT_TRUE(idx.contains("dog"));
  EXPECT_FALSE(idx.contains("do"));
}

TEST(CorrectToken, PrefersColumnTokensOnTies) {
  WordIndex english({"johnny", "jenny"});
  WordIndex column({"johnny", "penelope"});
  auto c = correct_token("jhonny", english, column);
  EXPECT_EQ(c.corrected, "johnny");
  EXPECT_TRUE(c.from_column);
  EXPECT_EQ(c.distance, 2u);
  EXPECT_EQ(correct_token("penelope", english, column).corrected, "penelope");
  EXPECT_EQ(correct_token("2021", english, column).corrected, "2021");
  EXPECT_EQ(correct_token("zzzzzz", english, column).corrected, "zzzzzz");
}

TEST(Lexicon, ShippedListsLoad) {
  auto lex = Lexicon::load(testing::data_dir());
  EXPECT_GE(lex.english.size(), 5000u);
  EXPECT_TRUE(lex.english.contains("johnny"));
  EXPECT_TRUE(lex.english.contains("colorado"));
  EXPECT_FALSE(lex.english.contains("jhonny"));
  EXPECT_TRUE(lex.is_stopword("the"));
  EXPECT_TRUE(lex.is_stopword("show"));
  EXPECT_FALSE(lex.is_stopword("mary"));
}

// Random misspellings of shipped words checked against a full scan.
TEST(CorrectToken, AgreesWithBruteForceScan) {
  auto english_words = read_word_list(testing::data_dir() + "/lexicon/english_words.txt");
  std::vector<std::string> sample(english_words.begin(), english_words.begin() + 3000);
  const std::vector<std::string> column_words{"johnny", "penelope", "guiness", "lollobrigida", "colorado",
                                              "nevada", "fiji", "mary", "smith"};
  WordIndex english(sample), column(column_words);
  std::mt19937 rng(99);
  const std::string letters = "abcdefghijklmnopqrstuvwxyz";
  for (int i = 0; i < 300; ++i) {
    std::string w = i % 3 == 0 ? column_words[rng() % column_words.size()] : sample[rng() % sample.size()];
    for (int edits = 1 + static_cast<int>(rng() % 2); edits > 0 && !w.empty(); --edits) {
      std::size_t pos = rng() % w.size();
      switch (rng() % 3) {
        case 0: w[pos] = letters[rng() % 26]; break;
        case 1: w.erase(pos, 1); break;
        default: w.insert(pos, 1, letters[rng() % 26]);
      }
    }
    if (w.empty()) continue;
    ASSERT_EQ(correct_token(w, english, column).corrected, oracle::best_correction(w, sample, column_words)) << w;
  }
}

}  // namespace
}  // namespace askdb
