#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace edumine {

// Civil date, proleptic Gregorian. Day numbers count from 1970-01-01.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  bool operator==(const Date&) const = default;
};

std::int64_t days_from_civil(const Date& d);
Date civil_from_days(std::int64_t days);

// "YYYY-MM-DD"
std::optional<Date> parse_date(const std::string& s);
std::string format_date(const Date& d);

// "YYYY-MM-DDThh:mm:ssZ" (trailing 'Z' optional, always UTC). Seconds since epoch.
std::optional<std::int64_t> parse_timestamp_utc(const std::string& s);
std::string format_timestamp_utc(std::int64_t epoch_seconds);

inline std::int64_t epoch_day(std::int64_t epoch_seconds) {
  // Flooring division; pipeline timestamps are all post-1970 but keep it total.
  std::int64_t d = epoch_seconds / 86400;
  if (epoch_seconds % 86400 < 0) --d;
  return d;
}

}  // namespace edumine
