#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "matcher.hpp"

namespace edumine {

struct PlaceEntry {
  std::int64_t geoname_id = 0;
  std::vector<std::string> name;  // normalized tokens
  std::string country;            // ISO-3166 alpha-2
  char feature_class = 'P';       // 'A' admin region, 'P' populated place
  std::int64_t population = 0;
};

struct GazetteerLoadStats {
  std::size_t rows = 0;
  std::size_t bad_rows = 0;       // wrong column count / unparseable fields
  std::size_t dropped_class = 0;  // feature class not in {A, P}
  std::size_t dropped_country = 0;
  std::size_t dropped_name = 0;  // stoplisted or below min_name_len
};

// The 32-country default allowlist.
const std::set<std::string>& default_country_allowlist();

// GeoNames dump: UTF-8, tab-separated, 19 columns. Emits one entry per usable
// primary and alternate name. Throws on unreadable file, or on bad rows when
// strict is set.
std::vector<PlaceEntry> load_geonames(const std::string& path,
                                      const std::set<std::string>& allowlist,
                                      const std::set<std::string>& stoplist,
                                      std::size_t min_name_len, bool strict,
                                      GazetteerLoadStats* stats = nullptr);

std::set<std::string> load_stoplist(const std::string& path);

class GazetteerIndex {
 public:
  explicit GazetteerIndex(std::vector<PlaceEntry> entries);

  const MatcherIndex& matcher() const { return *matcher_; }
  const std::vector<const PlaceEntry*>& candidates(const std::string& name) const;
  std::size_t name_count() const { return by_name_.size(); }
  std::size_t entry_count() const { return entries_.size(); }

 private:
  std::vector<PlaceEntry> entries_;
  std::unordered_map<std::string, std::vector<const PlaceEntry*>> by_name_;
  std::unique_ptr<MatcherIndex> matcher_;
};

struct GeoEvidence {
  MatchSpan span;
  const PlaceEntry* entry = nullptr;
};

struct GeoTag {
  std::optional<std::string> country;
  std::vector<GeoEvidence> evidence;
  bool ambiguous = false;
};

// Per-match: highest population wins, then smaller geoname_id. Record level:
// country with the most resolved matches, then the single highest-population
// evidence entry, otherwise none with ambiguous=true.
GeoTag resolve_location(const std::vector<std::string>& tokens, const GazetteerIndex& index);

}  // namespace edumine
