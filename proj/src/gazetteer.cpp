#include "gazetteer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

namespace edumine {

const std::set<std::string>& default_country_allowlist() {
  static const std::set<std::string> kCountries = {
      "AE", "AU", "BE", "BR", "CA", "CH", "CL", "CN", "DE", "EC", "ES",
      "FR", "GB", "IE", "IN", "IR", "IT", "JP", "KR", "MX", "NL", "NZ",
      "PE", "PK", "PT", "QA", "RU", "SA", "SE", "SG", "TR", "US"};
  return kCountries;
}

std::set<std::string> load_stoplist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stoplist file: " + path);
  std::set<std::string> stop;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto toks = token_surfaces(tokenize(normalize_text(line)));
    if (toks.empty()) continue;
    std::string joined;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (i) joined.push_back(' ');
      joined += toks[i];
    }
    stop.insert(joined);
  }
  return stop;
}

namespace {

std::size_t codepoint_count(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

std::string joined_name(const std::vector<std::string>& toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out.push_back(' ');
    out += toks[i];
  }
  return out;
}

}  // namespace

std::vector<PlaceEntry> load_geonames(const std::string& path,
                                      const std::set<std::string>& allowlist,
                                      const std::set<std::string>& stoplist,
                                      std::size_t min_name_len, bool strict,
                                      GazetteerLoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gazetteer file: " + path);

  GazetteerLoadStats local;
  GazetteerLoadStats& st = stats ? *stats : local;
  std::vector<PlaceEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++st.rows;
    auto cols = split(line, '\t');
    if (cols.size() != 19) {
      ++st.bad_rows;
      if (strict)
        throw std::runtime_error("gazetteer row " + std::to_string(lineno) + ": expected 19 columns, got " +
                                 std::to_string(cols.size()));
      continue;
    }
    std::int64_t geoname_id = 0;
    std::int64_t population = 0;
    try {
      geoname_id = std::stoll(cols[0]);
      if (!cols[14].empty()) population = std::stoll(cols[14]);
    } catch (const std::exception&) {
      ++st.bad_rows;
      if (strict) throw std::runtime_error("gazetteer row " + std::to_string(lineno) + ": bad numeric field");
      continue;
    }
    const std::string& fclass = cols[6];
    if (fclass != "A" && fclass != "P") {
      ++st.dropped_class;
      continue;
    }
    const std::string& country = cols[8];
    if (!allowlist.count(country)) {
      ++st.dropped_country;
      continue;
    }
    if (population < 0) population = 0;

    std::vector<std::string> names = {cols[1]};
    for (auto& alt : split(cols[3], ','))
      if (!alt.empty()) names.push_back(alt);

    std::set<std::string> seen_for_row;
    for (const auto& raw_name : names) {
      auto toks = token_surfaces(tokenize(normalize_text(raw_name)));
      if (toks.empty() || toks.size() > kMaxTermTokens) {
        ++st.dropped_name;
        continue;
      }
      bool too_short = false;
      for (const auto& t : toks)
        if (codepoint_count(t) < min_name_len) too_short = true;
      const std::string key = joined_name(toks);
      if (too_short || stoplist.count(key)) {
        ++st.dropped_name;
        continue;
      }
      if (!seen_for_row.insert(key).second) continue;
      PlaceEntry e;
      e.geoname_id = geoname_id;
      e.name = toks;
      e.country = country;
      e.feature_class = fclass[0];
      e.population = population;
      entries.push_back(std::move(e));
    }
  }
  return entries;
}

GazetteerIndex::GazetteerIndex(std::vector<PlaceEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::runtime_error("empty gazetteer");
  std::vector<std::string> names;
  for (const auto& e : entries_) {
    const std::string key = joined_name(e.name);
    auto& bucket = by_name_[key];
    if (bucket.empty()) names.push_back(key);
    bucket.push_back(&e);
  }
  Lexicon lex = lexicon_from_terms(names, "gazetteer");
  matcher_ = std::make_unique<MatcherIndex>(lex);
}

const std::vector<const PlaceEntry*>& GazetteerIndex::candidates(const std::string& name) const {
  static const std::vector<const PlaceEntry*> kEmpty;
  auto it = by_name_.find(name);
  return it == by_name_.end() ? kEmpty : it->second;
}

GeoTag resolve_location(const std::vector<std::string>& tokens, const GazetteerIndex& index) {
  GeoTag tag;
  for (auto& span : index.matcher().find_matches(tokens)) {
    const auto& cands = index.candidates(span.term);
    if (cands.empty()) continue;
    const PlaceEntry* best = cands.front();
    for (const PlaceEntry* c : cands) {
      if (c->population > best->population ||
          (c->population == best->population && c->geoname_id < best->geoname_id))
        best = c;
    }
    tag.evidence.push_back(GeoEvidence{std::move(span), best});
  }
  if (tag.evidence.empty()) return tag;

  std::map<std::string, std::size_t> votes;
  for (const auto& ev : tag.evidence) ++votes[ev.entry->country];
  std::size_t best_votes = 0;
  for (const auto& [_, n] : votes) best_votes = std::max(best_votes, n);
  std::vector<std::string> leaders;
  for (const auto& [cc, n] : votes)
    if (n == best_votes) leaders.push_back(cc);

  if (leaders.size() == 1) {
    tag.country = leaders.front();
    return tag;
  }

  // Majority tie: fall back to the single highest-population evidence entry
  // among the tied countries; an unresolved population tie stays unlocated.
  tag.ambiguous = true;
  std::int64_t best_pop = -1;
  bool unique = false;
  std::string pick;
  for (const auto& ev : tag.evidence) {
    if (std::find(leaders.begin(), leaders.end(), ev.entry->country) == leaders.end()) continue;
    if (ev.entry->population > best_pop) {
      best_pop = ev.entry->population;
      pick = ev.entry->country;
      unique = true;
    } else if (ev.entry->population == best_pop && ev.entry->country != pick) {
      unique = false;
    }
  }
  if (unique) tag.country = pick;
  return tag;
}

}  // namespace edumine
