#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace crowdalloc {

// ASCII-only case folding; bytes >= 0x80 pass through untouched so UTF-8
// stays valid.
inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  return out;
}

inline std::vector<std::string> whitespace_tokens(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Strips leading/trailing ASCII punctuation; interior characters stay.
inline std::string_view strip_punct(std::string_view token) {
  auto is_punct = [](char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return u < 0x80 && std::ispunct(u);
  };
  size_t b = 0, e = token.size();
  while (b < e && is_punct(token[b])) ++b;
  while (e > b && is_punct(token[e - 1])) --e;
  return token.substr(b, e - b);
}

inline bool is_all_alpha(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u >= 0x80 || !std::isalpha(u)) return false;
  }
  return true;
}

inline bool is_all_upper_alpha(std::string_view s) {
  if (!is_all_alpha(s)) return false;
  for (char c : s)
    if (!std::isupper(static_cast<unsigned char>(c))) return false;
  return true;
}

inline bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

}  // namespace crowdalloc
