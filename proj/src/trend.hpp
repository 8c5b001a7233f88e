#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dates.hpp"
#include "record.hpp"

namespace edumine {

struct WindowConfig {
  Date start{2020, 3, 23};
  Date end{2020, 6, 23};  // inclusive

  std::int64_t start_day() const { return days_from_civil(start); }
  std::int64_t end_day() const { return days_from_civil(end); }
  std::int64_t day_count() const { return end_day() - start_day() + 1; }
  // number of 7-day buckets anchored at start; the last may be partial
  std::int64_t week_count() const { return (day_count() + 6) / 7; }
};

// floor(days since window start / 7). Throws when the date is outside the window.
std::int64_t week_index(const Date& date, const WindowConfig& window);
std::int64_t week_index_for_day(std::int64_t epoch_day, const WindowConfig& window);

struct WeekRow {
  std::int64_t week = 0;
  std::int64_t total = 0;
  std::int64_t positive = 0;
  std::int64_t negative = 0;
};

struct CountryWeekSeries {
  std::string country;
  std::vector<WeekRow> weeks;  // contiguous from week 0 through the last window week
};

struct AggregateStats {
  std::int64_t topical_in_window = 0;
  std::int64_t unlocated = 0;
  std::int64_t out_of_window = 0;
};

// Records must already carry country and label annotations. Unlocated records
// are tallied, not dropped silently; countries with zero records are omitted.
// Enforces the conservation invariants and throws if they fail.
std::vector<CountryWeekSeries> aggregate(const std::vector<TweetRecord>& records,
                                         const WindowConfig& window, AggregateStats* stats);

struct CaseSeries {
  std::string country;
  std::vector<std::pair<Date, std::int64_t>> daily;  // strictly increasing dates
};

struct CaseLoadStats {
  std::size_t rejected_rows = 0;  // malformed or negative counts
  std::size_t gap_days = 0;       // missing window dates filled with 0
};

// CSV "date,country,confirmed" of daily new cases. Missing dates inside the
// window become 0 with a counted warning. Throws on unreadable file; strict
// mode keeps negative counts instead of rejecting them.
std::vector<CaseSeries> load_case_series(const std::string& path,
                                         const std::set<std::string>& allowlist,
                                         const WindowConfig& window, bool strict,
                                         CaseLoadStats* stats = nullptr);

// Daily counts summed onto the same anchored week grid.
std::vector<std::int64_t> weekly_cases(const CaseSeries& series, const WindowConfig& window);

// Sample Pearson correlation; nullopt when either series has zero variance.
// Throws on length mismatch or length < 2.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

struct CorrelationRow {
  std::string country;
  std::int64_t n_weeks = 0;
  std::optional<double> r_total;
  std::optional<double> r_positive;
  std::optional<double> r_negative;
};

CorrelationRow correlate_country(const CountryWeekSeries& series,
                                 const std::vector<std::int64_t>& weekly_case_counts);

struct ReportInputs {
  std::vector<CountryWeekSeries> series;
  std::vector<CaseSeries> cases;
  std::vector<std::string> report_countries;  // filter; empty means every country with data
  std::int64_t min_country_records = 0;
  WindowConfig window;
  AggregateStats agg_stats;
  CaseLoadStats case_stats;
};

// Writes country_<CC>.csv per reported country, correlations.csv, and
// summary.txt into out_dir. Byte-deterministic: countries sorted by code,
// fixed 6-digit decimals.
void emit_report(const ReportInputs& inputs, const std::string& out_dir);

}  // namespace edumine
