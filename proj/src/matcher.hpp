#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "text.hpp"

namespace edumine {

constexpr std::size_t kMaxTermTokens = 5;

// Normalized term token-sequences, deduplicated.
struct Lexicon {
  std::string name;
  std::vector<std::vector<std::string>> terms;
};

// Parses one term per line; '#' comments and blank lines ignored. Throws
// std::runtime_error on unreadable file or empty lexicon.
Lexicon load_lexicon(const std::string& path, const std::string& name);
Lexicon lexicon_from_terms(const std::vector<std::string>& raw_terms, const std::string& name);

// The six default COVID keywords.
Lexicon default_covid_lexicon();

struct MatchSpan {
  std::string term;  // matched term, tokens joined by single spaces
  std::size_t token_start = 0;
  std::size_t token_end = 0;  // exclusive

  bool operator==(const MatchSpan&) const = default;
};

// Token-level trie over term sequences. Immutable after build; lookups are
// leftmost-longest with non-overlap, anchored on whole tokens.
class MatcherIndex {
 public:
  explicit MatcherIndex(const Lexicon& lexicon);

  std::vector<MatchSpan> find_matches(const std::vector<std::string>& tokens) const;
  std::vector<MatchSpan> find_matches(const std::vector<TokenSpan>& tokens) const;

  const std::string& lexicon_name() const { return name_; }
  std::size_t term_count() const { return term_count_; }

 private:
  int token_id(const std::string& tok) const;

  std::string name_;
  std::size_t term_count_ = 0;
  std::size_t max_len_ = 0;
  std::unordered_map<std::string, int> vocab_;
  // state transitions keyed by (state << 32) | token_id; state 0 is the root
  std::unordered_map<std::uint64_t, int> edges_;
  std::vector<std::int8_t> terminal_;
  int state_count_ = 1;
};

struct TopicalResult {
  bool topical = false;
  std::vector<MatchSpan> covid_matches;
  std::vector<MatchSpan> edu_matches;
};

// Topical iff both lexicons hit at least once.
TopicalResult is_topical(const std::vector<std::string>& tokens, const MatcherIndex& covid,
                         const MatcherIndex& education);

}  // namespace edumine
