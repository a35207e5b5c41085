#include "farmsift/tagset.hpp"

#include <array>
#include <fstream>
#include <stdexcept>

#include "farmsift/text.hpp"

namespace farmsift {

namespace {

constexpr std::array<std::string_view, kPosCategoryCount> kNames = {
    "A", "C", "D", "I", "N", "OTHER", "P", "T", "PUNCT", "V", "WHITESPACE"};

constexpr std::array<std::string_view, 61> kCkipTags = {
    "A",    "Caa",  "Cab",  "Cba",  "Cbb",  "D",    "Da",   "Dfa",  "Dfb",
    "Di",   "Dk",   "DM",   "I",    "Na",   "Nb",   "Nc",   "Ncd",  "Nd",
    "Nep",  "Neqa", "Neqb", "Nes",  "Neu",  "Nf",   "Ng",   "Nh",   "Nv",
    "P",    "T",    "VA",   "VAC",  "VB",   "VC",   "VCL",  "VD",   "VE",
    "VF",   "VG",   "VH",   "VHC",  "VI",   "VJ",   "VK",   "VL",   "V_2",
    "DE",   "SHI",  "FW",
    "COLONCATEGORY",       "COMMACATEGORY",     "DASHCATEGORY",
    "DOTCATEGORY",         "ETCCATEGORY",       "EXCLAMATIONCATEGORY",
    "PARENTHESISCATEGORY", "PAUSECATEGORY",     "PERIODCATEGORY",
    "QUESTIONCATEGORY",    "SEMICOLONCATEGORY", "SPCHANGECATEGORY",
    "WHITESPACE"};

}  // namespace

std::string_view to_string(PosCategory c) {
  return kNames.at(static_cast<std::size_t>(c));
}

std::optional<PosCategory> pos_category_from_string(std::string_view s) {
  for (int i = 0; i < kPosCategoryCount; ++i) {
    if (kNames[static_cast<std::size_t>(i)] == s) {
      return static_cast<PosCategory>(i);
    }
  }
  return std::nullopt;
}

TagOverrides load_tag_overrides(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open tag override file: " +
                             path.string());
  }
  TagOverrides out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected RAWTAG<TAB>CATEGORY");
    }
    const auto category = pos_category_from_string(line.substr(tab + 1));
    if (!category) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": unknown category name");
    }
    out[line.substr(0, tab)] = *category;
  }
  return out;
}

PosCategory simplify(std::string_view raw_tag, const TagOverrides* overrides,
                     bool strict) {
  if (raw_tag.empty()) {
    throw std::invalid_argument("empty part-of-speech tag");
  }
  if (overrides) {
    const auto it = overrides->find(std::string(raw_tag));
    if (it != overrides->end()) return it->second;
  }
  if (raw_tag == "WHITESPACE") return PosCategory::kWhitespace;
  if (raw_tag.ends_with("CATEGORY")) return PosCategory::kPunct;
  if (raw_tag == "DE" || raw_tag == "SHI" || raw_tag == "FW") {
    return PosCategory::kOther;
  }
  switch (raw_tag.front()) {
    case 'A': return PosCategory::kAdjective;
    case 'C': return PosCategory::kConjunction;
    case 'D': return PosCategory::kAdverb;
    case 'I': return PosCategory::kInterjection;
    case 'N': return PosCategory::kNoun;
    case 'P': return PosCategory::kPreposition;
    case 'T': return PosCategory::kParticle;
    case 'V': return PosCategory::kVerb;
    default: break;
  }
  if (strict) {
    throw std::invalid_argument("unrecognized part-of-speech tag: " +
                                std::string(raw_tag));
  }
  return PosCategory::kOther;
}

PosVector one_hot(PosCategory c) {
  PosVector v = PosVector::Zero();
  v[static_cast<int>(c)] = 1.0;
  return v;
}

std::pair<std::vector<std::string>, std::vector<PosCategory>>
substitute_whitespace(std::vector<std::string> surfaces,
                      std::vector<PosCategory> tags) {
  if (surfaces.size() != tags.size()) {
    throw std::invalid_argument(
        "surface/tag count mismatch in whitespace substitution");
  }
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == PosCategory::kWhitespace) {
      surfaces[i] = std::string(text::kWhitespaceMark);
    }
  }
  return {std::move(surfaces), std::move(tags)};
}

std::span<const std::string_view> ckip_tags() {
  return {kCkipTags.data(), kCkipTags.size()};
}

}  // namespace farmsift
