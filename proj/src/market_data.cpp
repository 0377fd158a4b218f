#include "spectranet/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "csv.hpp"
#include "spectranet/errors.hpp"

namespace spectranet {

namespace {

bool parse_fixed_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

Date Date::parse(std::string_view text) {
  text = detail::trim(text);
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !parse_fixed_int(text.substr(0, 4), y) || !parse_fixed_int(text.substr(5, 2), m) ||
      !parse_fixed_int(text.substr(8, 2), d)) {
    throw InputError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  const std::chrono::year_month_day ymd{std::chrono::year(y),
                                        std::chrono::month(static_cast<unsigned>(m)),
                                        std::chrono::day(static_cast<unsigned>(d))};
  if (!ymd.ok()) throw InputError("invalid calendar date '" + std::string(text) + "'");
  return Date(std::chrono::sys_days(ymd));
}

std::string Date::to_string() const {
  const std::chrono::year_month_day ymd(days_);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

void validate(const PriceSeries& series) {
  if (series.dates.size() != series.prices.size()) {
    throw InputError("series " + series.ticker + ": dates and prices differ in length");
  }
  if (series.dates.size() < 2) {
    throw InputError("series " + series.ticker + ": fewer than 2 observations");
  }
  for (std::size_t i = 0; i < series.prices.size(); ++i) {
    if (!(series.prices[i] > 0.0) || !std::isfinite(series.prices[i])) {
      throw InputError("series " + series.ticker + ": non-positive price on " +
                       series.dates[i].to_string());
    }
    if (i > 0 && !(series.dates[i - 1] < series.dates[i])) {
      throw InputError("series " + series.ticker + ": dates not strictly increasing at " +
                       series.dates[i].to_string());
    }
  }
}

void validate(const ReturnPanel& panel) {
  if (panel.n() < 2 || panel.t() < 2) {
    throw InputError("return panel needs at least 2 stocks and 2 observations, got " +
                     std::to_string(panel.n()) + "x" + std::to_string(panel.t()));
  }
  if (panel.tickers.size() != panel.n() || panel.dates.size() != panel.t()) {
    throw InputError("return panel labels do not match its shape");
  }
  for (double v : panel.returns.data()) {
    if (!std::isfinite(v)) throw InputError("return panel contains a non-finite entry");
  }
}

AlignPolicy parse_align_policy(std::string_view text) {
  if (text == "intersect") return AlignPolicy::intersect;
  if (text == "forward_fill") return AlignPolicy::forward_fill;
  throw ConfigError("unknown align policy '" + std::string(text) + "'");
}

std::string_view to_string(AlignPolicy policy) {
  return policy == AlignPolicy::intersect ? "intersect" : "forward_fill";
}

std::vector<PriceSeries> load_prices(const std::filesystem::path& source) {
  std::ifstream in(source);
  if (!in) throw InputError("cannot open price file " + source.string());
  return load_prices(in);
}

std::vector<PriceSeries> load_prices(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("price CSV: empty file");
  auto header = detail::split_csv_line(line);
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);
  if (header.size() < 2 || detail::trim(header[0]) != "date") {
    throw InputError("price CSV: malformed header (need `date` followed by ticker columns)");
  }
  std::vector<std::string> tickers;
  std::set<std::string> seen;
  for (std::size_t c = 1; c < header.size(); ++c) {
    std::string t(detail::trim(header[c]));
    if (t.empty()) throw InputError("price CSV: malformed header (empty ticker in column " +
                                    std::to_string(c + 1) + ")");
    if (!seen.insert(t).second) throw InputError("price CSV: duplicate ticker " + t);
    tickers.push_back(std::move(t));
  }

  std::vector<std::map<Date, double>> columns(tickers.size());
  std::vector<std::string> problems;
  std::set<Date> row_dates;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != header.size()) {
      problems.push_back(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                         std::to_string(fields.size()));
      continue;
    }
    Date date;
    try {
      date = Date::parse(fields[0]);
    } catch (const InputError& e) {
      problems.push_back(where + ": " + e.what());
      continue;
    }
    if (!row_dates.insert(date).second) {
      problems.push_back(where + ": duplicate date " + date.to_string());
      continue;
    }
    for (std::size_t c = 0; c < tickers.size(); ++c) {
      const auto cell = detail::trim(fields[c + 1]);
      if (cell.empty()) continue;
      double price = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), price);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(price)) {
        problems.push_back(where + ": unparseable price '" + std::string(cell) + "' for " +
                           tickers[c] + " on " + date.to_string());
      } else if (price <= 0.0) {
        problems.push_back(where + ": non-positive price " + std::string(cell) + " for " +
                           tickers[c] + " on " + date.to_string());
      } else {
        columns[c].emplace(date, price);
      }
    }
  }
  if (!problems.empty()) {
    constexpr std::size_t kShown = 10;
    std::vector<std::string> shown(problems.begin(),
                                   problems.begin() + std::min(problems.size(), kShown));
    std::string msg = "price CSV: " + std::to_string(problems.size()) + " bad row(s): " +
                      join(shown, "; ");
    if (problems.size() > kShown) msg += "; ...";
    throw InputError(msg);
  }

  std::vector<std::string> short_tickers;
  for (std::size_t c = 0; c < tickers.size(); ++c) {
    if (columns[c].size() < 2) short_tickers.push_back(tickers[c]);
  }
  if (!short_tickers.empty()) {
    throw InputError("price CSV: fewer than 2 usable rows for ticker(s) " +
                     join(short_tickers, ", "));
  }

  std::vector<PriceSeries> out(tickers.size());
  for (std::size_t c = 0; c < tickers.size(); ++c) {
    out[c].ticker = tickers[c];
    for (const auto& [d, p] : columns[c]) {
      out[c].dates.push_back(d);
      out[c].prices.push_back(p);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PriceSeries& a, const PriceSeries& b) { return a.ticker < b.ticker; });
  return out;
}

std::vector<PriceSeries> align(const std::vector<PriceSeries>& series, AlignPolicy policy) {
  if (series.size() < 2) throw InputError("align: need at least 2 series");
  for (const auto& s : series) validate(s);

  std::vector<Date> grid;
  if (policy == AlignPolicy::intersect) {
    grid = series.front().dates;
    for (std::size_t k = 1; k < series.size(); ++k) {
      std::vector<Date> next;
      std::set_intersection(grid.begin(), grid.end(), series[k].dates.begin(),
                            series[k].dates.end(), std::back_inserter(next));
      grid = std::move(next);
    }
    if (grid.empty()) throw InputError("align: date intersection is empty");
  } else {
    Date latest_start = series.front().dates.front();
    std::set<Date> all;
    for (const auto& s : series) {
      latest_start = std::max(latest_start, s.dates.front());
      all.insert(s.dates.begin(), s.dates.end());
    }
    grid.assign(all.lower_bound(latest_start), all.end());
  }

  std::vector<PriceSeries> out;
  out.reserve(series.size());
  for (const auto& s : series) {
    PriceSeries a{s.ticker, grid, {}};
    a.prices.reserve(grid.size());
    std::size_t pos = 0;
    for (const Date& d : grid) {
      // Last observation at or before d; exists because grid starts at or
      // after every series' first date.
      while (pos + 1 < s.dates.size() && s.dates[pos + 1] <= d) ++pos;
      a.prices.push_back(s.prices[pos]);
    }
    out.push_back(std::move(a));
  }
  return out;
}

ReturnPanel log_returns(const std::vector<PriceSeries>& series) {
  if (series.empty()) throw InputError("log_returns: no series");
  for (const auto& s : series) {
    validate(s);
    if (s.dates != series.front().dates) {
      throw InputError("log_returns: series " + s.ticker + " is not aligned with " +
                       series.front().ticker);
    }
  }
  const std::size_t n = series.size();
  const std::size_t t = series.front().dates.size() - 1;
  ReturnPanel panel;
  panel.dates.assign(series.front().dates.begin() + 1, series.front().dates.end());
  panel.returns = Matrix(n, t);
  for (std::size_t j = 0; j < n; ++j) {
    panel.tickers.push_back(series[j].ticker);
    const auto& p = series[j].prices;
    for (std::size_t k = 0; k < t; ++k) panel.returns(j, k) = std::log(p[k + 1]) - std::log(p[k]);
  }
  return panel;
}

ReturnPanel standardize(const ReturnPanel& panel) {
  if (panel.t() < 2) throw InputError("standardize: need at least 2 observations");
  ReturnPanel out = panel;
  const double t = static_cast<double>(panel.t());
  for (std::size_t j = 0; j < panel.n(); ++j) {
    const auto row = panel.returns.row(j);
    const double mean = std::accumulate(row.begin(), row.end(), 0.0) / t;
    double ss = 0.0;
    for (double v : row) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (t - 1.0));
    if (!(sd > 0.0)) throw InputError("standardize: zero variance for ticker " + panel.tickers[j]);
    auto dst = out.returns.row(j);
    for (std::size_t k = 0; k < row.size(); ++k) dst[k] = (row[k] - mean) / sd;
  }
  return out;
}

void write_prices_csv(std::ostream& out, const std::vector<PriceSeries>& series) {
  if (series.empty()) throw InputError("write_prices_csv: no series");
  for (const auto& s : series) {
    if (s.dates != series.front().dates) throw InputError("write_prices_csv: series not aligned");
  }
  out << "date";
  for (const auto& s : series) out << ',' << detail::csv_field(s.ticker);
  out << '\n';
  for (std::size_t r = 0; r < series.front().dates.size(); ++r) {
    out << series.front().dates[r].to_string();
    for (const auto& s : series) out << ',' << format_double(s.prices[r]);
    out << '\n';
  }
}

std::vector<PriceSeries> prices_from_returns(const ReturnPanel& panel, double start_price) {
  if (panel.t() == 0) throw InputError("prices_from_returns: empty panel");
  std::vector<Date> dates;
  dates.reserve(panel.t() + 1);
  dates.push_back(Date(panel.dates.front().days() - std::chrono::days(1)));
  dates.insert(dates.end(), panel.dates.begin(), panel.dates.end());
  std::vector<PriceSeries> out;
  for (std::size_t j = 0; j < panel.n(); ++j) {
    PriceSeries s{panel.tickers[j], dates, {}};
    s.prices.reserve(dates.size());
    const double log_start = std::log(start_price);
    double cumulative = 0.0;
    s.prices.push_back(start_price);
    for (double r : panel.returns.row(j)) {
      cumulative += r;
      const double price = std::exp(log_start + cumulative);
      if (!std::isfinite(price) || !(price > 0.0)) {
        throw InputError("prices_from_returns: cumulative return of " + panel.tickers[j] +
                         " leaves the representable price range");
      }
      s.prices.push_back(price);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace spectranet
