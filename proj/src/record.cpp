#include "record.hpp"

#include <json.hpp>

#include "dates.hpp"

namespace edumine {

using nlohmann::json;

ParseResult parse_record(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return {{}, "malformed record"};

  TweetRecord r;
  auto need_string = [&](const char* key, std::string& out) -> std::string {
    auto it = j.find(key);
    if (it == j.end()) return std::string("missing required field '") + key + "'";
    if (!it->is_string()) return std::string("field '") + key + "' is not a string";
    out = it->get<std::string>();
    return {};
  };

  std::string err;
  if (!(err = need_string("id", r.id)).empty()) return {{}, err};
  if (r.id.empty()) return {{}, "empty id"};
  std::string ts;
  if (!(err = need_string("created_at", ts)).empty()) return {{}, err};
  auto t = parse_timestamp_utc(ts);
  if (!t) return {{}, "unparseable timestamp '" + ts + "'"};
  r.created_at = *t;
  if (!(err = need_string("text", r.text)).empty()) return {{}, err};
  if (r.text.size() > 10000) return {{}, "text exceeds 10000 bytes"};

  if (auto it = j.find("lang"); it != j.end() && it->is_string()) {
    std::string lang = it->get<std::string>();
    if (lang.size() == 2) r.lang = lang;
  }

  // Annotations round-trip through stage files.
  if (auto it = j.find("covid_matches"); it != j.end() && it->is_array())
    r.covid_matches = it->get<std::vector<std::string>>();
  if (auto it = j.find("edu_matches"); it != j.end() && it->is_array())
    r.edu_matches = it->get<std::vector<std::string>>();
  if (auto it = j.find("country"); it != j.end() && it->is_string())
    r.country = it->get<std::string>();
  if (auto it = j.find("ambiguous"); it != j.end() && it->is_boolean())
    r.ambiguous = it->get<bool>();
  if (auto it = j.find("label"); it != j.end() && it->is_number_integer())
    r.label = it->get<int>();

  return {std::move(r), {}};
}

std::string record_to_json(const TweetRecord& r) {
  json j = json::object();
  j["id"] = r.id;
  j["created_at"] = format_timestamp_utc(r.created_at);
  j["text"] = r.text;
  if (r.lang) j["lang"] = *r.lang;
  if (!r.covid_matches.empty()) j["covid_matches"] = r.covid_matches;
  if (!r.edu_matches.empty()) j["edu_matches"] = r.edu_matches;
  if (r.country) j["country"] = *r.country;
  if (r.ambiguous) j["ambiguous"] = true;
  if (r.label) j["label"] = *r.label;
  return j.dump();
}

}  // namespace edumine
