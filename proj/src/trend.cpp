#include "trend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

namespace edumine {

std::int64_t week_index_for_day(std::int64_t epoch_day, const WindowConfig& window) {
  if (epoch_day < window.start_day() || epoch_day > window.end_day())
    throw std::runtime_error("date outside analysis window");
  return (epoch_day - window.start_day()) / 7;
}

std::int64_t week_index(const Date& date, const WindowConfig& window) {
  return week_index_for_day(days_from_civil(date), window);
}

std::vector<CountryWeekSeries> aggregate(const std::vector<TweetRecord>& records,
                                         const WindowConfig& window, AggregateStats* stats) {
  AggregateStats local;
  AggregateStats& st = stats ? *stats : local;
  const std::int64_t weeks = window.week_count();

  std::map<std::string, std::vector<WeekRow>> per_country;
  for (const auto& r : records) {
    const std::int64_t day = epoch_day(r.created_at);
    if (day < window.start_day() || day > window.end_day()) {
      ++st.out_of_window;
      continue;
    }
    ++st.topical_in_window;
    if (!r.country) {
      ++st.unlocated;
      continue;
    }
    if (!r.label) throw std::runtime_error("record '" + r.id + "' reached aggregation unlabeled");
    auto& rows = per_country[*r.country];
    if (rows.empty()) {
      rows.resize(weeks);
      for (std::int64_t w = 0; w < weeks; ++w) rows[w].week = w;
    }
    WeekRow& row = rows[week_index_for_day(day, window)];
    ++row.total;
    if (*r.label == 1)
      ++row.positive;
    else
      ++row.negative;
  }

  std::vector<CountryWeekSeries> out;
  std::int64_t grand_total = 0;
  for (auto& [cc, rows] : per_country) {
    for (const auto& row : rows) {
      if (row.positive + row.negative != row.total)
        throw std::runtime_error("conservation violated for " + cc);
      grand_total += row.total;
    }
    out.push_back(CountryWeekSeries{cc, std::move(rows)});
  }
  if (grand_total + st.unlocated != st.topical_in_window)
    throw std::runtime_error("conservation violated: located + unlocated != topical");
  return out;
}

std::vector<CaseSeries> load_case_series(const std::string& path,
                                         const std::set<std::string>& allowlist,
                                         const WindowConfig& window, bool strict,
                                         CaseLoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open case file: " + path);
  CaseLoadStats local;
  CaseLoadStats& st = stats ? *stats : local;

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty case file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "date,country,confirmed")
    throw std::runtime_error("case file header must be 'date,country,confirmed'");

  std::map<std::string, std::map<std::int64_t, std::int64_t>> by_country;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    auto reject = [&](const std::string& why) {
      if (strict) throw std::runtime_error("case file row " + std::to_string(lineno) + ": " + why);
      ++st.rejected_rows;
    };
    if (c2 == std::string::npos) {
      reject("expected 3 comma-separated fields");
      continue;
    }
    const auto date = parse_date(line.substr(0, c1));
    const std::string country = line.substr(c1 + 1, c2 - c1 - 1);
    std::int64_t count = 0;
    bool numeric = true;
    try {
      std::size_t used = 0;
      count = std::stoll(line.substr(c2 + 1), &used);
      numeric = used == line.size() - c2 - 1;
    } catch (const std::exception&) {
      numeric = false;
    }
    if (!date || !numeric) {
      reject("malformed row");
      continue;
    }
    if (!allowlist.count(country)) continue;
    if (count < 0 && !strict) {
      // daily correction rows; strict mode keeps the sign
      ++st.rejected_rows;
      continue;
    }
    const std::int64_t day = days_from_civil(*date);
    if (!by_country[country].emplace(day, count).second) reject("duplicate date");
  }

  std::vector<CaseSeries> out;
  for (auto& [cc, days] : by_country) {
    CaseSeries s;
    s.country = cc;
    for (const auto& [day, count] : days) s.daily.emplace_back(civil_from_days(day), count);
    for (std::int64_t d = window.start_day(); d <= window.end_day(); ++d)
      if (!days.count(d)) ++st.gap_days;  // treated as 0 downstream
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::int64_t> weekly_cases(const CaseSeries& series, const WindowConfig& window) {
  std::vector<std::int64_t> weeks(window.week_count(), 0);
  for (const auto& [date, count] : series.daily) {
    const std::int64_t day = days_from_civil(date);
    if (day < window.start_day() || day > window.end_day()) continue;
    weeks[week_index_for_day(day, window)] += count;
  }
  return weeks;
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::runtime_error("pearson: length mismatch");
  if (x.size() < 2) throw std::runtime_error("pearson: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

CorrelationRow correlate_country(const CountryWeekSeries& series,
                                 const std::vector<std::int64_t>& weekly_case_counts) {
  CorrelationRow row;
  row.country = series.country;
  row.n_weeks = static_cast<std::int64_t>(series.weeks.size());
  std::vector<double> cases(weekly_case_counts.begin(), weekly_case_counts.end());
  auto corr = [&](auto field) {
    std::vector<double> v;
    v.reserve(series.weeks.size());
    for (const auto& w : series.weeks) v.push_back(static_cast<double>(field(w)));
    return pearson(v, cases);
  };
  row.r_total = corr([](const WeekRow& w) { return w.total; });
  row.r_positive = corr([](const WeekRow& w) { return w.positive; });
  row.r_negative = corr([](const WeekRow& w) { return w.negative; });
  return row;
}

namespace {

std::string fmt6(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

}  // namespace

void emit_report(const ReportInputs& inputs, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::map<std::string, const CaseSeries*> cases_by_cc;
  for (const auto& s : inputs.cases) cases_by_cc[s.country] = &s;

  std::vector<const CountryWeekSeries*> reported;
  for (const auto& s : inputs.series) {
    if (!inputs.report_countries.empty() &&
        std::find(inputs.report_countries.begin(), inputs.report_countries.end(), s.country) ==
            inputs.report_countries.end())
      continue;
    std::int64_t total = 0;
    for (const auto& w : s.weeks) total += w.total;
    if (total < inputs.min_country_records) continue;
    reported.push_back(&s);
  }
  std::sort(reported.begin(), reported.end(),
            [](const auto* a, const auto* b) { return a->country < b->country; });

  const std::int64_t weeks = inputs.window.week_count();
  const std::int64_t days = inputs.window.day_count();

  std::ofstream corr(fs::path(out_dir) / "correlations.csv", std::ios::binary);
  if (!corr) throw std::runtime_error("cannot write correlations.csv in " + out_dir);
  corr << "country,n_weeks,r_total,r_positive,r_negative\n";

  for (const auto* s : reported) {
    std::vector<std::int64_t> wc(weeks, 0);
    if (auto it = cases_by_cc.find(s->country); it != cases_by_cc.end())
      wc = weekly_cases(*it->second, inputs.window);

    const fs::path p = fs::path(out_dir) / ("country_" + s->country + ".csv");
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << "week_index,week_start,partial,total,positive,negative,weekly_cases\n";
    for (std::int64_t w = 0; w < weeks; ++w) {
      const Date week_start = civil_from_days(inputs.window.start_day() + w * 7);
      const bool partial = (w + 1) * 7 > days;
      const WeekRow& row = s->weeks[w];
      out << w << ',' << format_date(week_start) << ',' << (partial ? 1 : 0) << ',' << row.total
          << ',' << row.positive << ',' << row.negative << ',' << wc[w] << "\n";
    }

    const CorrelationRow r = correlate_country(*s, wc);
    corr << r.country << ',' << r.n_weeks << ',' << fmt6(r.r_total) << ',' << fmt6(r.r_positive)
         << ',' << fmt6(r.r_negative) << "\n";
  }

  std::ofstream sum(fs::path(out_dir) / "summary.txt", std::ios::binary);
  if (!sum) throw std::runtime_error("cannot write summary.txt in " + out_dir);
  sum << "topical_in_window=" << inputs.agg_stats.topical_in_window << "\n"
      << "unlocated=" << inputs.agg_stats.unlocated << "\n"
      << "out_of_window=" << inputs.agg_stats.out_of_window << "\n"
      << "case_rows_rejected=" << inputs.case_stats.rejected_rows << "\n"
      << "case_gap_days=" << inputs.case_stats.gap_days << "\n"
      << "countries_reported=" << reported.size() << "\n";
}

}  // namespace edumine
