#include "farmsift/sentiment.hpp"

#include <unordered_set>

#include "farmsift/text.hpp"

namespace farmsift {

std::vector<ScoredChar> explode(std::span<const std::string> words,
                                const Lexicon& lex) {
  std::vector<ScoredChar> out;
  out.reserve(words.size() * 2);
  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto score = lookup(lex, words[w]);
    if (!text::contains_cjk(words[w])) {
      out.push_back({words[w], score, w, true});
      continue;
    }
    for (auto& cp : text::codepoints(words[w])) {
      const bool atomic = !text::contains_cjk(cp);
      out.push_back({std::move(cp), score, w, atomic});
    }
  }
  return out;
}

std::vector<CharBigram> char_bigrams(std::span<const ScoredChar> chars) {
  std::vector<CharBigram> out;
  for (std::size_t i = 0; i + 1 < chars.size(); ++i) {
    if (chars[i].atomic || chars[i + 1].atomic) continue;
    out.push_back({i, chars[i].ch + chars[i + 1].ch});
  }
  return out;
}

std::vector<ScoredWord> backfill(std::span<const std::string> words,
                                 const Lexicon& lex) {
  std::vector<ScoredChar> chars = explode(words, lex);

  std::unordered_set<std::string_view> word_surfaces;
  for (const auto& w : words) word_surfaces.insert(w);

  // Applying in stream order makes later bigrams see earlier updates.
  for (const auto& bigram : char_bigrams(chars)) {
    if (word_surfaces.contains(bigram.surface)) continue;
    const auto found = lookup(lex, bigram.surface);
    if (!found) continue;
    for (std::size_t k = bigram.index; k <= bigram.index + 1; ++k) {
      auto& unit = chars[k];
      unit.score = unit.score ? (*unit.score + *found) / 2.0 : *found;
    }
  }

  std::vector<ScoredWord> out;
  out.reserve(words.size());
  for (std::size_t w = 0; w < words.size(); ++w) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& unit : chars) {
      if (unit.word_index != w) continue;
      sum += unit.score.value_or(0.0);
      ++n;
    }
    double score = n ? sum / static_cast<double>(n) : 0.0;
    if (words[w] == text::kWhitespaceMark) score = 0.0;
    out.push_back({words[w], score});
  }
  return out;
}

double word_score(std::string_view word, const Lexicon& lex) {
  const std::string s(word);
  return backfill(std::span(&s, 1), lex)[0].score;
}

}  // namespace farmsift
