#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "farmsift/text.hpp"

namespace farmsift {

// Word-level sentiment scores in [-1, 1].
struct Lexicon {
  std::unordered_map<std::string, double, text::StringHash, std::equal_to<>>
      entries;
};

// Format: word<TAB>score per line. Lines starting with '#' and blank lines
// are skipped; columns after the score are ignored; later duplicates win.
// Throws std::runtime_error with "file:line:" on malformed input.
Lexicon load_lexicon(const std::filesystem::path& path);

// Writes word<TAB>score, words sorted bytewise.
void save_lexicon(const Lexicon& lex, const std::filesystem::path& path);

std::optional<double> lookup(const Lexicon& lex, std::string_view word);

// Entry counts keyed by word length in code points.
std::map<std::size_t, std::size_t> length_histogram(const Lexicon& lex);

}  // namespace farmsift
