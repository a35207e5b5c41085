#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace farmsift::text {

// Placeholder surface for whitespace tokens: U+03B1, deliberately outside the
// CJK blocks so it never participates in character bigrams.
inline constexpr std::string_view kWhitespaceMark = "\xCE\xB1";  // α

// Splits UTF-8 into one string per code point. A malformed byte is kept as a
// unit of its own rather than rejected; upstream formats are validated
// elsewhere.
std::vector<std::string> codepoints(std::string_view s);

std::size_t codepoint_count(std::string_view s);

// CJK Unified Ideographs, including extensions A-F and the URO.
bool is_cjk(char32_t cp);

bool contains_cjk(std::string_view s);

// Lets unordered_map<std::string, V, StringHash, std::equal_to<>> look up by
// string_view without a temporary string.
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

}  // namespace farmsift::text
