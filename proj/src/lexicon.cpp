#include "farmsift/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace farmsift {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " +
                           what);
}

}  // namespace

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open lexicon file: " + path.string());
  }
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      fail(path, line_no, "expected word<TAB>score");
    }
    const std::string word = line.substr(0, tab);
    if (word.empty()) fail(path, line_no, "empty word");
    std::size_t end = line.find('\t', tab + 1);
    if (end == std::string::npos) end = line.size();
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + end;
    double score = 0.0;
    const auto res = std::from_chars(first, last, score);
    if (res.ec != std::errc{} || res.ptr != last) {
      fail(path, line_no, "score is not a number");
    }
    if (!std::isfinite(score) || score < -1.0 || score > 1.0) {
      fail(path, line_no, "score outside [-1, 1]");
    }
    lex.entries[word] = score;  // last duplicate wins
  }
  return lex;
}

void save_lexicon(const Lexicon& lex, const std::filesystem::path& path) {
  std::vector<const std::string*> words;
  words.reserve(lex.entries.size());
  for (const auto& [w, s] : lex.entries) words.push_back(&w);
  std::sort(words.begin(), words.end(),
            [](const auto* a, const auto* b) { return *a < *b; });
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write lexicon file: " + path.string());
  }
  char buf[64];
  for (const auto* w : words) {
    std::snprintf(buf, sizeof buf, "%.17g", lex.entries.at(*w));
    out << *w << '\t' << buf << '\n';
  }
}

std::optional<double> lookup(const Lexicon& lex, std::string_view word) {
  const auto it = lex.entries.find(word);
  if (it == lex.entries.end()) return std::nullopt;
  return it->second;
}

std::map<std::size_t, std::size_t> length_histogram(const Lexicon& lex) {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& [word, score] : lex.entries) {
    ++hist[text::codepoint_count(word)];
  }
  return hist;
}

}  // namespace farmsift
