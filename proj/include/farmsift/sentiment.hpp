#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "farmsift/lexicon.hpp"

namespace farmsift {

// One unit of the exploded character stream. Words with no CJK character
// (digits, Latin, the α mark) stay whole as a single atomic unit; CJK words
// explode into one unit per code point, each inheriting the word's lexicon
// score if it has one.
struct ScoredChar {
  std::string ch;
  std::optional<double> score;
  std::size_t word_index = 0;
  bool atomic = false;
};

struct ScoredWord {
  std::string surface;
  double score = 0.0;
};

struct CharBigram {
  std::size_t index = 0;  // stream position of the left unit
  std::string surface;
};

std::vector<ScoredChar> explode(std::span<const std::string> words,
                                const Lexicon& lex);

// Adjacent unit pairs over the whole stream, crossing word boundaries.
// Pairs touching an atomic unit are skipped, which also excludes α.
std::vector<CharBigram> char_bigrams(std::span<const ScoredChar> chars);

// Word scores with character-bigram backfill. Bigrams found in the lexicon,
// unless their surface equals one of the input words, are applied in stream
// order to their two positions: an unscored unit takes the bigram score, a
// scored unit moves to the mean of the two. A word's score is the mean over
// its units with unscored units counted as 0; α scores 0 outright.
std::vector<ScoredWord> backfill(std::span<const std::string> words,
                                 const Lexicon& lex);

// backfill for a single word.
double word_score(std::string_view word, const Lexicon& lex);

}  // namespace farmsift
