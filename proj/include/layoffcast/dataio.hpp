#pragma once
// Layoff-event ingestion and the weekly calendar.
//
// Week t covers the seven days starting Sunday 2022-01-02 + 7t. Negative t
// index the 2020-2021 history.

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "layoffcast/betabinom.hpp"

namespace layoffcast {

using Date = std::chrono::year_month_day;

// Sunday that starts week 0.
inline constexpr Date kEpochWeekStart{std::chrono::year{2022}, std::chrono::January,
                                      std::chrono::day{2}};

// Strict ISO-8601 YYYY-MM-DD; nullopt on anything else or an invalid date.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& d);

// First day (Sunday) of week t.
Date week_to_date(int t);
// Week containing d (floor division, so dates before the epoch are negative).
int date_to_week(const Date& d);

struct LayoffEvent {
  Date date;
  std::string company;
  std::optional<std::int64_t> laid_off_count;
  std::optional<double> percentage;
};

struct SkippedRow {
  std::size_t line = 0;  // 1-based line number in the input
  std::string reason;
};

struct ParsedEvents {
  std::vector<LayoffEvent> events;
  std::vector<SkippedRow> skipped;
};

// Header row required with a `date` column; `company`, `laid_off_count` and
// `percentage` are optional. Rows with a bad or out-of-range date are
// skipped and recorded. Throws FormatError when `date` is missing.
ParsedEvents parse_events(std::istream& in);
ParsedEvents parse_events_file(const std::string& path);

enum class CountMode {
  per_event,         // one count per report row
  per_company_week,  // duplicates of (company, week) collapse to one
};

// counts[t - from] = events dated within week t, for t in [from, to].
WeeklySeries aggregate_weekly(const std::vector<LayoffEvent>& events, int from, int to,
                              CountMode mode = CountMode::per_event);

// Events in the 52 Sunday-weeks lying fully inside 2021, divided by 52.
double baseline_2021(const std::vector<LayoffEvent>& events);

// Series CSV: week_index,week_start_date,count
void write_series_csv(std::ostream& out, const WeeklySeries& series);
WeeklySeries read_series_csv(std::istream& in);
WeeklySeries read_series_file(const std::string& path);

// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace layoffcast
