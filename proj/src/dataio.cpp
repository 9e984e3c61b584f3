#include "layoffcast/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "layoffcast/errors.hpp"

namespace layoffcast {

namespace {

using std::chrono::days;
using std::chrono::sys_days;

constexpr Date kMinDate{std::chrono::year{2020}, std::chrono::January, std::chrono::day{1}};
constexpr Date kMaxDate{std::chrono::year{2030}, std::chrono::December, std::chrono::day{31}};

std::string_view trim(std::string_view s) {
  auto issp = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && issp(s.front())) s.remove_prefix(1);
  while (!s.empty() && issp(s.back())) s.remove_suffix(1);
  return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto ys = text.substr(0, 4), ms = text.substr(5, 2), ds = text.substr(8, 2);
  if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) return std::nullopt;
  int y = *parse_number<int>(ys);
  unsigned m = *parse_number<unsigned>(ms);
  unsigned d = *parse_number<unsigned>(ds);
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

Date week_to_date(int t) { return Date{sys_days{kEpochWeekStart} + days{7LL * t}}; }

int date_to_week(const Date& d) {
  long long offset = (sys_days{d} - sys_days{kEpochWeekStart}).count();
  return static_cast<int>(floor_div(offset, 7));
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

ParsedEvents parse_events(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  // Skip leading blank lines; the first non-blank line is the header.
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw FormatError("input has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  auto header = split_csv_line(line);
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (trim(header[k]) == name) return k;
    return std::nullopt;
  };
  auto date_col = column("date");
  if (!date_col) throw FormatError("header lacks the required 'date' column");
  auto company_col = column("company");
  auto count_col = column("laid_off_count");
  auto pct_col = column("percentage");

  ParsedEvents out;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    auto field = [&](std::optional<std::size_t> col) -> std::string_view {
      if (!col || *col >= fields.size()) return {};
      return trim(fields[*col]);
    };
    auto date_text = field(date_col);
    auto date = parse_date(date_text);
    if (!date) {
      out.skipped.push_back({lineno, "unparseable date '" + std::string(date_text) + "'"});
      continue;
    }
    if (sys_days{*date} < sys_days{kMinDate} || sys_days{*date} > sys_days{kMaxDate}) {
      out.skipped.push_back({lineno, "date " + format_date(*date) + " outside 2020-2030"});
      continue;
    }
    LayoffEvent ev;
    ev.date = *date;
    ev.company = std::string(field(company_col));
    auto count = parse_number<std::int64_t>(field(count_col));
    if (count && *count >= 0) ev.laid_off_count = count;
    auto pct = parse_number<double>(field(pct_col));
    if (pct && *pct >= 0.0) ev.percentage = pct;
    out.events.push_back(std::move(ev));
  }
  return out;
}

ParsedEvents parse_events_file(const std::string& path) {
  auto in = open_input(path);
  return parse_events(in);
}

WeeklySeries aggregate_weekly(const std::vector<LayoffEvent>& events, int from, int to,
                              CountMode mode) {
  if (from > to) throw PreconditionError("aggregate_weekly: from > to");
  WeeklySeries series;
  series.start_week = from;
  series.counts.assign(static_cast<std::size_t>(to - from + 1), 0);
  std::set<std::pair<int, std::string>> seen;
  for (const auto& ev : events) {
    int w = date_to_week(ev.date);
    if (w < from || w > to) continue;
    if (mode == CountMode::per_company_week && !seen.emplace(w, ev.company).second) continue;
    ++series.counts[static_cast<std::size_t>(w - from)];
  }
  return series;
}

double baseline_2021(const std::vector<LayoffEvent>& events) {
  // First Sunday of 2021 is 2021-01-03; 52 weeks later is 2022-01-02.
  const int first = date_to_week(Date{std::chrono::year{2021}, std::chrono::January,
                                      std::chrono::day{3}});
  const int last = first + 51;
  std::size_t n = 0;
  for (const auto& ev : events) {
    int w = date_to_week(ev.date);
    if (w >= first && w <= last) ++n;
  }
  return static_cast<double>(n) / 52.0;
}

void write_series_csv(std::ostream& out, const WeeklySeries& series) {
  out << "week_index,week_start_date,count\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    int t = series.start_week + static_cast<int>(k);
    out << t << ',' << format_date(week_to_date(t)) << ',' << series.counts[k] << '\n';
  }
}

WeeklySeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("series file is empty");
  auto header = split_csv_line(line);
  if (header.size() < 3 || trim(header[0]) != "week_index" || trim(header[2]) != "count")
    throw FormatError("series header must be week_index,week_start_date,count");
  WeeklySeries series;
  std::size_t lineno = 1;
  bool first = true;
  int expected = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto f = split_csv_line(line);
    auto week = f.size() >= 3 ? parse_number<int>(f[0]) : std::nullopt;
    auto count = f.size() >= 3 ? parse_number<std::int64_t>(f[2]) : std::nullopt;
    if (!week || !count || *count < 0) {
      std::ostringstream os;
      os << "series line " << lineno << ": malformed row";
      throw FormatError(os.str());
    }
    if (first) {
      series.start_week = *week;
      expected = *week;
      first = false;
    }
    if (*week != expected) {
      std::ostringstream os;
      os << "series line " << lineno << ": expected week " << expected << ", got " << *week;
      throw FormatError(os.str());
    }
    ++expected;
    series.counts.push_back(*count);
  }
  return series;
}

WeeklySeries read_series_file(const std::string& path) {
  auto in = open_input(path);
  return read_series_csv(in);
}

}  // namespace layoffcast
