#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "farmsift/corpus.hpp"
#include "farmsift/embedding.hpp"
#include "farmsift/lexicon.hpp"
#include "farmsift/tagset.hpp"
#include "farmsift/types.hpp"

namespace farmsift {

// Headlines are truncated or zero-padded to this many token rows.
inline constexpr Index kMaxHeadlineTokens = 100;

enum class FeatureSet {
  kEmb,         // embedding only
  kEmbPos,      // + 11-entry POS one-hot
  kEmbPosSent,  // + sentiment scalar
};

std::string_view to_string(FeatureSet fs);
// Accepts "emb", "emb-pos", "emb-pos-sent".
std::optional<FeatureSet> feature_set_from_string(std::string_view s);

constexpr bool has_pos(FeatureSet fs) { return fs != FeatureSet::kEmb; }
constexpr bool has_sentiment(FeatureSet fs) {
  return fs == FeatureSet::kEmbPosSent;
}

constexpr int feature_width(FeatureSet fs, int embedding_dim) {
  return embedding_dim + (has_pos(fs) ? kPosCategoryCount : 0) +
         (has_sentiment(fs) ? 1 : 0);
}

struct TaggedToken {
  std::string surface;  // α substituted for whitespace
  std::string raw_pos;
  PosCategory pos = PosCategory::kOther;
  double sentiment = 0.0;
};

struct TaggedHeadline {
  std::string id;
  std::vector<TaggedToken> tokens;
  int label = Record::kUnlabeled;
  std::string source;
};

// Simplifies tags, substitutes α for whitespace tokens, and runs sentiment
// backfill when a lexicon is given (sentiment is 0 otherwise). Throws on a
// record without tokens: raw headlines need an external segmenter/tagger
// first.
TaggedHeadline prepare_headline(const Record& record, const Lexicon* lex,
                                const TagOverrides* overrides = nullptr);

// Row t describes token t: embedding, then the POS block, then sentiment,
// depending on the feature set. Rows at and past used_rows are all zero.
struct FeatureMatrix {
  Matrix values;
  Index used_rows = 0;
};

FeatureMatrix build_matrix(const TaggedHeadline& headline,
                           const EmbeddingTable& table, FeatureSet fs);

// Same, reusing out's storage across calls.
void build_matrix_into(const TaggedHeadline& headline,
                       const EmbeddingTable& table, FeatureSet fs,
                       FeatureMatrix& out);

}  // namespace farmsift
