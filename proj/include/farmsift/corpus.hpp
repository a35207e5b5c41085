#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "farmsift/tagset.hpp"

namespace farmsift {

// Token as it comes from the upstream segmenter: surface plus raw tag.
struct RawToken {
  std::string surface;
  std::string pos;
};

struct Record {
  static constexpr int kUnlabeled = -1;

  std::string id;
  std::string headline;
  std::vector<RawToken> tokens;
  int label = kUnlabeled;  // 0 credible, 1 farm
  std::string source;
  std::string date;
  std::optional<std::string> origin_url;
};

enum class LoadMode {
  kLabeled,  // label required
  kPredict,  // label optional
};

// JSON Lines; one record per line. Throws std::runtime_error with
// "file:line:" on malformed lines or missing required fields.
std::vector<Record> load_corpus(const std::filesystem::path& path,
                                LoadMode mode = LoadMode::kLabeled);

void save_corpus(std::span<const Record> records,
                 const std::filesystem::path& path);

// Newlines, tabs and carriage returns in the headline become spaces, space
// runs collapse, ends are trimmed. Idempotent. Tokens are left alone.
Record clean(Record r);

// Drops farm-labeled records whose origin_url host is one of the credible
// domains or a subdomain of one. Credible-labeled records always stay.
std::vector<Record> drop_cross_source(
    std::vector<Record> records, std::span<const std::string> credible_domains);

// Subsamples the majority class uniformly down to the minority count,
// preserving input order. Equal classes come back unchanged.
std::vector<Record> balance(std::vector<Record> records, std::uint64_t seed);

struct CorpusSplit {
  std::vector<Record> train;
  std::vector<Record> validation;
  std::vector<Record> test;
};

// Seeded per-class shuffle, classes interleaved, then cut into
// floor(0.8 n) train, ceil of half the rest validation, rest test. Per-class
// counts inside each part differ by at most one.
CorpusSplit split_corpus(std::vector<Record> records, std::uint64_t seed);

struct ClassStats {
  std::size_t count = 0;
  double mean_tokens = 0.0;
  // Mean token count per headline by simplified category, ordinal order.
  std::array<double, kPosCategoryCount> pos_means{};
};

struct CorpusStats {
  std::optional<ClassStats> credible;
  std::optional<ClassStats> farm;
};

CorpusStats stats(std::span<const Record> records);

// Style gaps the generator plants between the classes. Defaults reproduce
// category-frequency gaps measured on real wire vs content-farm headlines:
// farms use more punctuation and adverbs, slant word choice, and lean on
// high-valence vocabulary.
struct StyleKnobs {
  double punct_gap = 1.359093;   // extra punctuation tokens per farm headline
  double adverb_gap = 0.460576;  // extra adverbs per farm headline
  double word_gap = 0.65;         // content-vocabulary skew between classes
  double sentiment_gap = 0.35;    // extra chance a farm content word is emotive
};

struct SyntheticCorpus {
  std::vector<Record> records;  // credible block then farm block
  std::map<std::string, double> lexicon;
  std::vector<std::string> vocabulary;  // every surface plus the α mark
};

// Seeded synthetic headline corpus, n_per_class records per class. Knobs at
// zero make the classes statistically identical.
SyntheticCorpus generate_synthetic_corpus(int n_per_class, std::uint64_t seed,
                                          const StyleKnobs& knobs = {});

// Records only.
std::vector<Record> generate_synthetic(int n_per_class, std::uint64_t seed,
                                       const StyleKnobs& knobs = {});

}  // namespace farmsift
