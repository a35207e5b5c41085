#pragma once

#include <span>
#include <vector>

#include "farmsift/features.hpp"
#include "farmsift/model.hpp"

namespace farmsift {

std::vector<TaggedHeadline> prepare_headlines(
    std::span<const Record> records, const Lexicon* lex,
    const TagOverrides* overrides = nullptr);

// Feature matrices on demand; one reusable buffer instead of size() dense
// 100-row matrices. The reference from matrix() goes stale on the next call.
class HeadlineDataset final : public SampleSource {
 public:
  HeadlineDataset(std::vector<TaggedHeadline> headlines,
                  const EmbeddingTable& table, FeatureSet fs)
      : headlines_(std::move(headlines)), table_(&table), fs_(fs) {}

  std::size_t size() const override { return headlines_.size(); }

  int label(std::size_t i) const override { return headlines_[i].label; }

  const FeatureMatrix& matrix(std::size_t i) const override {
    build_matrix_into(headlines_[i], *table_, fs_, buffer_);
    return buffer_;
  }

  const std::vector<TaggedHeadline>& headlines() const { return headlines_; }

 private:
  std::vector<TaggedHeadline> headlines_;
  const EmbeddingTable* table_;
  FeatureSet fs_;
  mutable FeatureMatrix buffer_;
};

}  // namespace farmsift
