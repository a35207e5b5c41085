#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace farmsift {

// Simplified part-of-speech categories. Ordinal order is fixed: feature
// columns, stats reports and the one-hot rows all index by it.
enum class PosCategory : int {
  kAdjective = 0,   // A
  kConjunction,     // C
  kAdverb,          // D
  kInterjection,    // I
  kNoun,            // N
  kOther,           // OTHER
  kPreposition,     // P
  kParticle,        // T
  kPunct,           // PUNCT
  kVerb,            // V
  kWhitespace,      // WHITESPACE
};

inline constexpr int kPosCategoryCount = 11;

using PosVector = Eigen::Matrix<double, kPosCategoryCount, 1>;

std::string_view to_string(PosCategory c);
std::optional<PosCategory> pos_category_from_string(std::string_view s);

using TagOverrides = std::unordered_map<std::string, PosCategory>;

// Format: RAWTAG<TAB>CATEGORY per line, '#' comments allowed.
TagOverrides load_tag_overrides(const std::filesystem::path& path);

// Collapses a raw CKIP-style tag. Rule order: override table, exact
// WHITESPACE, *CATEGORY suffix, the DE/SHI/FW specials, then the first
// letter. Anything else is kOther, or an error in strict mode. An empty tag
// is always an error.
PosCategory simplify(std::string_view raw_tag,
                     const TagOverrides* overrides = nullptr,
                     bool strict = false);

PosVector one_hot(PosCategory c);

// Replaces the surface of whitespace-tagged tokens with the α mark, keeping
// the tag. Throws on length mismatch.
std::pair<std::vector<std::string>, std::vector<PosCategory>>
substitute_whitespace(std::vector<std::string> surfaces,
                      std::vector<PosCategory> tags);

// The published CKIP tag inventory; test fixtures iterate it.
std::span<const std::string_view> ckip_tags();

}  // namespace farmsift
