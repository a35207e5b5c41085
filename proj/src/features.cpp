#include "farmsift/features.hpp"

#include <stdexcept>

#include "farmsift/sentiment.hpp"

namespace farmsift {

std::string_view to_string(FeatureSet fs) {
  switch (fs) {
    case FeatureSet::kEmb: return "emb";
    case FeatureSet::kEmbPos: return "emb-pos";
    case FeatureSet::kEmbPosSent: return "emb-pos-sent";
  }
  return "?";
}

std::optional<FeatureSet> feature_set_from_string(std::string_view s) {
  if (s == "emb") return FeatureSet::kEmb;
  if (s == "emb-pos") return FeatureSet::kEmbPos;
  if (s == "emb-pos-sent") return FeatureSet::kEmbPosSent;
  return std::nullopt;
}

TaggedHeadline prepare_headline(const Record& record, const Lexicon* lex,
                                const TagOverrides* overrides) {
  if (record.tokens.empty()) {
    throw std::invalid_argument(
        "record \"" + record.id +
        "\" has no tokens; headlines must be segmented and POS-tagged "
        "upstream before they can be featurized");
  }
  std::vector<std::string> surfaces;
  std::vector<PosCategory> tags;
  surfaces.reserve(record.tokens.size());
  tags.reserve(record.tokens.size());
  for (const auto& t : record.tokens) {
    surfaces.push_back(t.surface);
    tags.push_back(simplify(t.pos, overrides));
  }
  std::tie(surfaces, tags) =
      substitute_whitespace(std::move(surfaces), std::move(tags));

  std::vector<double> sentiments(surfaces.size(), 0.0);
  if (lex) {
    const auto scored = backfill(surfaces, *lex);
    for (std::size_t i = 0; i < scored.size(); ++i) {
      sentiments[i] = scored[i].score;
    }
  }

  TaggedHeadline out;
  out.id = record.id;
  out.label = record.label;
  out.source = record.source;
  out.tokens.reserve(record.tokens.size());
  for (std::size_t i = 0; i < record.tokens.size(); ++i) {
    out.tokens.push_back({std::move(surfaces[i]), record.tokens[i].pos,
                          tags[i], sentiments[i]});
  }
  return out;
}

FeatureMatrix build_matrix(const TaggedHeadline& headline,
                           const EmbeddingTable& table, FeatureSet fs) {
  FeatureMatrix out;
  build_matrix_into(headline, table, fs, out);
  return out;
}

void build_matrix_into(const TaggedHeadline& headline,
                       const EmbeddingTable& table, FeatureSet fs,
                       FeatureMatrix& out) {
  const int dim = table.dim;
  const int width = feature_width(fs, dim);
  if (out.values.rows() != kMaxHeadlineTokens || out.values.cols() != width) {
    out.values.setZero(kMaxHeadlineTokens, width);
  } else if (out.used_rows > 0) {
    out.values.topRows(out.used_rows).setZero();
  }

  const Index n = std::min<Index>(
      static_cast<Index>(headline.tokens.size()), kMaxHeadlineTokens);
  for (Index t = 0; t < n; ++t) {
    const TaggedToken& tok = headline.tokens[static_cast<std::size_t>(t)];
    auto row = out.values.row(t);
    if (const Vector* v = find_vector(table, tok.surface)) {
      row.head(dim) = v->transpose();
    } else if (table.oov_policy == OovPolicy::kHash) {
      row.head(dim) = hash_vector(tok.surface, dim, table.oov_seed).transpose();
    }
    if (has_pos(fs)) {
      row[dim + static_cast<int>(tok.pos)] = 1.0;
    }
    if (has_sentiment(fs)) {
      row[width - 1] = tok.sentiment;
    }
  }
  out.used_rows = n;
}

}  // namespace farmsift
