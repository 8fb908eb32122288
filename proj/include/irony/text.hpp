// Small string/tokenization helpers shared across the toolkit.
#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace irony {

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Drops ASCII and typographic apostrophes ("don't" -> "dont").
inline std::string strip_apostrophes(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\'') continue;
    // U+2019 right single quotation mark: 0xE2 0x80 0x99
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x80 &&
        static_cast<unsigned char>(s[i + 2]) == 0x99) {
      i += 2;
      continue;
    }
    out += s[i];
  }
  return out;
}

inline std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == delim) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

namespace detail {
inline bool is_trailing_punct(char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':':
    case ')': case ']': case '"':
      return true;
    default:
      return false;
  }
}
}  // namespace detail

// Fallback tokenizer for utterances without a dependency parse:
// whitespace split, then trailing punctuation peeled off as separate tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) break;
    std::string_view word = text.substr(start, i - start);
    size_t end = word.size();
    while (end > 1 && detail::is_trailing_punct(word[end - 1])) --end;
    tokens.emplace_back(word.substr(0, end));
    for (size_t k = end; k < word.size(); ++k) tokens.emplace_back(1, word[k]);
  }
  return tokens;
}

struct Codepoint {
  char32_t value;
  size_t begin;  // byte offset
  size_t size;   // byte length
};

// Permissive UTF-8 decoding; malformed bytes come back as single-byte points.
inline std::vector<Codepoint> utf8_codepoints(std::string_view s) {
  std::vector<Codepoint> out;
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    size_t len = 1;
    char32_t cp = c;
    if ((c & 0x80u) == 0) {
      len = 1;
    } else if ((c & 0xE0u) == 0xC0u) {
      len = 2;
      cp = c & 0x1Fu;
    } else if ((c & 0xF0u) == 0xE0u) {
      len = 3;
      cp = c & 0x0Fu;
    } else if ((c & 0xF8u) == 0xF0u) {
      len = 4;
      cp = c & 0x07u;
    }
    if (i + len > s.size()) len = 1, cp = c;
    for (size_t k = 1; k < len; ++k) {
      unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0u) != 0x80u) {
        len = 1;
        cp = c;
        break;
      }
      cp = (cp << 6) | (cc & 0x3Fu);
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace irony
