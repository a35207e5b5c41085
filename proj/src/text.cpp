#include "farmsift/text.hpp"

namespace farmsift::text {

namespace {

// Decodes the code point starting at s[i]; writes its byte length to len.
// Malformed sequences decode as a single byte with cp = 0xFFFD.
char32_t decode(std::string_view s, std::size_t i, std::size_t& len) {
  const auto byte = [&](std::size_t k) {
    return static_cast<unsigned char>(s[k]);
  };
  const unsigned char b0 = byte(i);
  std::size_t need = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    len = 1;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    need = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    need = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    need = 3;
    cp = b0 & 0x07;
  } else {
    len = 1;
    return 0xFFFD;
  }
  if (i + need >= s.size()) {
    len = 1;
    return 0xFFFD;
  }
  for (std::size_t k = 1; k <= need; ++k) {
    const unsigned char b = byte(i + k);
    if ((b & 0xC0) != 0x80) {
      len = 1;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  len = need + 1;
  return cp;
}

}  // namespace

std::vector<std::string> codepoints(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = 0;
    decode(s, i, len);
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::size_t codepoint_count(std::string_view s) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = 0;
    decode(s, i, len);
    i += len;
    ++n;
  }
  return n;
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) ||    // URO
         (cp >= 0x3400 && cp <= 0x4DBF) ||    // ext A
         (cp >= 0x20000 && cp <= 0x2A6DF) ||  // ext B
         (cp >= 0x2A700 && cp <= 0x2EBEF);    // ext C-F
}

bool contains_cjk(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = 0;
    const char32_t cp = decode(s, i, len);
    if (is_cjk(cp)) return true;
    i += len;
  }
  return false;
}

}  // namespace farmsift::text
