#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace edumine {

// Token in the *normalized* text. Offsets are byte positions on UTF-8 boundaries.
struct TokenSpan {
  std::string surface;
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;

  bool operator==(const TokenSpan&) const = default;
};

// NFC, simple case folding, URL removal (http:// and https:// through the next
// whitespace), whitespace runs collapsed to a single space, trimmed.
// Total and idempotent; invalid UTF-8 bytes are replaced by U+FFFD.
std::string normalize_text(const std::string& raw);

// Tokens are maximal runs of letters, digits, apostrophe or hyphen. '#' and '@'
// act as separators, so "#covid" yields "covid". Input must be normalized text.
std::vector<TokenSpan> tokenize(const std::string& normalized);

// Surfaces only, for callers that do not need offsets.
std::vector<std::string> token_surfaces(const std::vector<TokenSpan>& spans);

}  // namespace edumine
