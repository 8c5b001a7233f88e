#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace edumine {

struct TweetRecord {
  std::string id;
  std::int64_t created_at = 0;  // epoch seconds, UTC
  std::string text;             // raw text as received
  std::optional<std::string> lang;
  // Annotation fields carried between pipeline stages. Unknown input fields
  // are dropped; these are the only extensions we serialize.
  std::vector<std::string> covid_matches;
  std::vector<std::string> edu_matches;
  std::optional<std::string> country;
  bool ambiguous = false;
  std::optional<int> label;
};

struct RecordError {
  std::string message;
};

// One NDJSON line -> record. Fails on malformed structure, missing required
// fields, bad timestamp, or text over 10,000 bytes.
struct ParseResult {
  std::optional<TweetRecord> record;
  std::string error;
  bool ok() const { return record.has_value(); }
};

ParseResult parse_record(const std::string& line);

// Serialize with whatever annotations are present, deterministic key order.
std::string record_to_json(const TweetRecord& r);

}  // namespace edumine
