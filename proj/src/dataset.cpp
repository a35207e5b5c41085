#include "farmsift/dataset.hpp"

namespace farmsift {

std::vector<TaggedHeadline> prepare_headlines(std::span<const Record> records,
                                              const Lexicon* lex,
                                              const TagOverrides* overrides) {
  std::vector<TaggedHeadline> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(prepare_headline(r, lex, overrides));
  }
  return out;
}

}  // namespace farmsift
