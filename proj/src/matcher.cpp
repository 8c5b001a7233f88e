#include "matcher.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace edumine {

namespace {

std::string join_tokens(const std::vector<std::string>& toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out.push_back(' ');
    out += toks[i];
  }
  return out;
}

}  // namespace

Lexicon lexicon_from_terms(const std::vector<std::string>& raw_terms, const std::string& name) {
  Lexicon lex;
  lex.name = name;
  std::set<std::vector<std::string>> seen;
  for (const auto& raw : raw_terms) {
    auto toks = token_surfaces(tokenize(normalize_text(raw)));
    if (toks.empty()) continue;
    if (toks.size() > kMaxTermTokens)
      throw std::runtime_error("lexicon '" + name + "': term '" + raw + "' exceeds " +
                               std::to_string(kMaxTermTokens) + " tokens");
    if (seen.insert(toks).second) lex.terms.push_back(std::move(toks));
  }
  if (lex.terms.empty()) throw std::runtime_error("empty lexicon '" + name + "'");
  return lex;
}

Lexicon load_lexicon(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon file: " + path);
  std::vector<std::string> raw;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    raw.push_back(line);
  }
  return lexicon_from_terms(raw, name);
}

Lexicon default_covid_lexicon() {
  return lexicon_from_terms(
      {"corona", "coronavirus", "covid", "pandemic", "sarscov2", "covid-19"}, "covid");
}

MatcherIndex::MatcherIndex(const Lexicon& lexicon) : name_(lexicon.name) {
  terminal_.push_back(0);
  for (const auto& term : lexicon.terms) {
    int state = 0;
    for (const auto& tok : term) {
      auto [vit, _] = vocab_.try_emplace(tok, static_cast<int>(vocab_.size()));
      const std::uint64_t key =
          (static_cast<std::uint64_t>(state) << 32) | static_cast<std::uint32_t>(vit->second);
      auto [eit, inserted] = edges_.try_emplace(key, state_count_);
      if (inserted) {
        ++state_count_;
        terminal_.push_back(0);
      }
      state = eit->second;
    }
    terminal_[state] = 1;
    ++term_count_;
    max_len_ = std::max(max_len_, term.size());
  }
}

int MatcherIndex::token_id(const std::string& tok) const {
  auto it = vocab_.find(tok);
  return it == vocab_.end() ? -1 : it->second;
}

std::vector<MatchSpan> MatcherIndex::find_matches(const std::vector<std::string>& tokens) const {
  std::vector<MatchSpan> out;
  const std::size_t n = tokens.size();
  std::size_t i = 0;
  while (i < n) {
    int state = 0;
    std::size_t best_len = 0;
    for (std::size_t k = 0; k < max_len_ && i + k < n; ++k) {
      const int tid = token_id(tokens[i + k]);
      if (tid < 0) break;
      const std::uint64_t key =
          (static_cast<std::uint64_t>(state) << 32) | static_cast<std::uint32_t>(tid);
      auto it = edges_.find(key);
      if (it == edges_.end()) break;
      state = it->second;
      if (terminal_[state]) best_len = k + 1;
    }
    if (best_len > 0) {
      std::vector<std::string> matched(tokens.begin() + i, tokens.begin() + i + best_len);
      out.push_back(MatchSpan{join_tokens(matched), i, i + best_len});
      i += best_len;
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<MatchSpan> MatcherIndex::find_matches(const std::vector<TokenSpan>& tokens) const {
  return find_matches(token_surfaces(tokens));
}

TopicalResult is_topical(const std::vector<std::string>& tokens, const MatcherIndex& covid,
                         const MatcherIndex& education) {
  TopicalResult r;
  r.covid_matches = covid.find_matches(tokens);
  r.edu_matches = education.find_matches(tokens);
  r.topical = !r.covid_matches.empty() && !r.edu_matches.empty();
  return r;
}

}  // namespace edumine
