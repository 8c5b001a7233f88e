#include "text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace edumine {

namespace {

std::string fold_nfc(const std::string& raw) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(raw);
  icu::UnicodeString n = nfc->normalize(u, status);
  icu::UnicodeString folded;
  for (int32_t i = 0; i < n.length();) {
    UChar32 c = n.char32At(i);
    folded.append(u_foldCase(c, U_FOLD_CASE_DEFAULT));
    i += U16_LENGTH(c);
  }
  // Folding can denormalize; re-apply NFC so the result is stable.
  icu::UnicodeString out = nfc->normalize(folded, status);
  std::string utf8;
  out.toUTF8String(utf8);
  if (U_FAILURE(status)) return raw;
  return utf8;
}

bool starts_with(const std::string& s, std::size_t pos, const char* prefix) {
  return s.compare(pos, std::char_traits<char>::length(prefix), prefix) == 0;
}

}  // namespace

std::string normalize_text(const std::string& raw) {
  const std::string folded = fold_nfc(raw);

  std::string out;
  out.reserve(folded.size());
  bool pending_space = false;
  const char* data = folded.data();
  const int32_t len = static_cast<int32_t>(folded.size());
  int32_t i = 0;
  while (i < len) {
    if (starts_with(folded, i, "http://") || starts_with(folded, i, "https://")) {
      // Drop through the next whitespace.
      while (i < len) {
        int32_t j = i;
        UChar32 c;
        U8_NEXT(data, j, len, c);
        if (c >= 0 && u_isUWhiteSpace(c)) break;
        i = j;
      }
      pending_space = !out.empty();
      continue;
    }
    int32_t j = i;
    UChar32 c;
    U8_NEXT(data, j, len, c);
    if (c < 0) {
      i = j;
      continue;  // invalid sequence already replaced upstream; skip defensively
    }
    if (u_isUWhiteSpace(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.append(folded, i, j - i);
    }
    i = j;
  }
  return out;
}

namespace {

bool in_token(UChar32 c) {
  return u_isalpha(c) || u_isdigit(c) || c == '\'' || c == '-';
}

}  // namespace

std::vector<TokenSpan> tokenize(const std::string& normalized) {
  std::vector<TokenSpan> spans;
  const char* data = normalized.data();
  const int32_t len = static_cast<int32_t>(normalized.size());
  int32_t i = 0;
  int32_t tok_start = -1;
  auto flush = [&](int32_t end) {
    if (tok_start >= 0 && end > tok_start) {
      spans.push_back(TokenSpan{normalized.substr(tok_start, end - tok_start),
                                static_cast<std::size_t>(tok_start),
                                static_cast<std::size_t>(end)});
    }
    tok_start = -1;
  };
  while (i < len) {
    int32_t j = i;
    UChar32 c;
    U8_NEXT(data, j, len, c);
    if (c >= 0 && in_token(c)) {
      if (tok_start < 0) tok_start = i;
    } else {
      flush(i);
    }
    i = j;
  }
  flush(len);
  return spans;
}

std::vector<std::string> token_surfaces(const std::vector<TokenSpan>& spans) {
  std::vector<std::string> out;
  out.reserve(spans.size());
  for (const auto& s : spans) out.push_back(s.surface);
  return out;
}

}  // namespace edumine
